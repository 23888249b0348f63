#include "mublab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace mublab {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

class Counted {
public:
    Counted(const Objective& f, long budget) : f_(f), budget_(budget) {}

    double operator()(const Vec& x) {
        const double v = f_(x);
        ++used_;
        if (!std::isfinite(v)) throw Error("minimize: objective returned a non-finite value");
        if (v < best_value_) {
            best_value_ = v;
            best_x_ = x;
        }
        return v;
    }

    long remaining() const { return budget_ - used_; }
    long used() const { return used_; }
    double best_value() const { return best_value_; }
    const Vec& best_x() const { return best_x_; }

private:
    const Objective& f_;
    long budget_;
    long used_ = 0;
    double best_value_ = std::numeric_limits<double>::infinity();
    Vec best_x_;
};

struct Box {
    const Vec& lo;
    const Vec& hi;

    Vec project(Vec x) const {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
        return x;
    }
};

// Central differences, one-sided where the box cuts the stencil.
Vec gradient(Counted& f, const Box& box, const Vec& x, double h) {
    Vec g(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        Vec xp = x;
        Vec xm = x;
        xp[i] = std::min(x[i] + h, box.hi[i]);
        xm[i] = std::max(x[i] - h, box.lo[i]);
        const double span = xp[i] - xm[i];
        if (span <= 0.0) continue;
        g[i] = (f(xp) - f(xm)) / span;
    }
    return g;
}

// Zero the components that point out of the box at active bounds.
Vec projected_gradient(const Box& box, const Vec& x, const Vec& g) {
    Vec pg = g;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if ((x[i] <= box.lo[i] && g[i] > 0.0) || (x[i] >= box.hi[i] && g[i] < 0.0)) pg[i] = 0.0;
    }
    return pg;
}

Vec lbfgs_direction(const Vec& pg, const std::deque<std::pair<Vec, Vec>>& mem) {
    Vec q = pg;
    std::vector<double> alpha(mem.size());
    for (std::size_t k = mem.size(); k-- > 0;) {
        const auto& [s, y] = mem[k];
        alpha[k] = dot(s, q) / dot(y, s);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * y[i];
    }
    double gamma = 1.0 / std::max(1.0, norm(pg));
    if (!mem.empty()) {
        const auto& [s, y] = mem.back();
        gamma = dot(s, y) / dot(y, y);
    }
    for (auto& v : q) v *= gamma;
    for (std::size_t k = 0; k < mem.size(); ++k) {
        const auto& [s, y] = mem[k];
        const double beta = dot(y, q) / dot(y, s);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += s[i] * (alpha[k] - beta);
    }
    for (auto& v : q) v = -v;
    return q;
}

void run_restart(Counted& f, const OptimizerSpec& spec, const Box& box, Vec x) {
    const std::size_t n = x.size();
    const long grad_cost = 2 * static_cast<long>(n);
    x = box.project(std::move(x));
    if (f.remaining() < 1) return;
    double fx = f(x);
    std::deque<std::pair<Vec, Vec>> mem;
    Vec g;
    Vec prev_x;
    Vec prev_g;

    while (f.remaining() >= grad_cost + 1) {
        g = gradient(f, box, x, spec.h);
        if (!prev_x.empty()) {
            Vec s(n), y(n);
            for (std::size_t i = 0; i < n; ++i) {
                s[i] = x[i] - prev_x[i];
                y[i] = g[i] - prev_g[i];
            }
            if (dot(s, y) > 1e-12) {
                mem.emplace_back(std::move(s), std::move(y));
                if (static_cast<int>(mem.size()) > spec.memory) mem.pop_front();
            }
        }
        const Vec pg = projected_gradient(box, x, g);
        if (norm(pg) < spec.grad_tol) return;

        Vec d = lbfgs_direction(pg, mem);
        if (dot(d, pg) >= 0.0) {
            mem.clear();
            d = lbfgs_direction(pg, mem);
        }

        bool accepted = false;
        Vec x_new;
        double f_new = fx;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            double t = 1.0;
            for (int k = 0; k < 30 && f.remaining() >= 1; ++k, t *= 0.5) {
                Vec trial(n);
                for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + t * d[i];
                trial = box.project(std::move(trial));
                double decrease = 0.0;
                for (std::size_t i = 0; i < n; ++i) decrease += pg[i] * (trial[i] - x[i]);
                if (decrease >= 0.0) break;
                const double ft = f(trial);
                if (ft <= fx + 1e-4 * decrease) {
                    accepted = true;
                    x_new = std::move(trial);
                    f_new = ft;
                    break;
                }
            }
            if (!accepted) {
                if (mem.empty()) break;
                mem.clear();
                d = lbfgs_direction(pg, mem);
            }
        }
        if (!accepted) return;

        const double improvement = fx - f_new;
        prev_x = x;
        prev_g = g;
        x = std::move(x_new);
        fx = f_new;
        if (improvement <= spec.rel_tol * std::max(1.0, std::abs(fx))) return;
    }
}

}  // namespace

void OptimizerSpec::validate() const {
    if (max_evals < 1) throw ContractViolation("OptimizerSpec: max_evals >= 1");
    if (!(h > 0.0)) throw ContractViolation("OptimizerSpec: h > 0");
    if (restarts < 1) throw ContractViolation("OptimizerSpec: restarts >= 1");
    if (memory < 1) throw ContractViolation("OptimizerSpec: memory >= 1");
    const std::size_t n = lower.size();
    if (n == 0 || upper.size() != n || init_lower.size() != n || init_upper.size() != n) {
        throw ContractViolation("OptimizerSpec: bound vectors must be non-empty and of equal length");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lower[i] <= upper[i]) || !(init_lower[i] <= init_upper[i])) {
            throw ContractViolation("OptimizerSpec: lower bound above upper bound");
        }
    }
}

OptimizerResult minimize(const Objective& f, const OptimizerSpec& spec, SeededRng& rng,
                         const std::vector<std::vector<double>>& starts) {
    spec.validate();
    const Box box{spec.lower, spec.upper};
    OptimizerResult out;
    out.value = std::numeric_limits<double>::infinity();
    for (int r = 0; r < spec.restarts; ++r) {
        Vec x0(spec.dim());
        if (static_cast<std::size_t>(r) < starts.size()) {
            if (starts[r].size() != spec.dim()) throw InvalidDimension("minimize: start has wrong dimension");
            x0 = starts[r];
        } else {
            for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = rng.uniform(spec.init_lower[i], spec.init_upper[i]);
        }
        Counted counted(f, spec.max_evals);
        run_restart(counted, spec, box, std::move(x0));
        out.n_evals += counted.used();
        if (counted.best_value() < out.value) {
            out.value = counted.best_value();
            out.x = counted.best_x();
        }
    }
    return out;
}

}  // namespace mublab
