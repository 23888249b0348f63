#include "mublab/qaoa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace mublab {

namespace {

constexpr std::uint64_t kStandardStream = 0x510E527FADE682D1ULL;
constexpr std::uint64_t kAdaptiveStream = 0x9B05688C2B3E6C1FULL;

void apply_layers(StateVector& s, const DiagonalCost& cost, std::span<const double> angles) {
    if (angles.size() % 2 != 0) throw InvalidDimension("QAOA angles come in (gamma, beta) pairs");
    for (std::size_t k = 0; k < angles.size(); k += 2) {
        evolve_cost(s, cost, angles[k]);
        evolve_xmixer(s, angles[k + 1]);
    }
}

void check_inputs(const EncodedProblem& problem, int p) {
    if (problem.n_qubits < 1 || problem.n_qubits > kMaxQaoaQubits) {
        throw InvalidDimension("QAOA: n must be in [1, 14]");
    }
    if (p < 1 || p > 3) throw InvalidDimension("QAOA: depth p must be in {1, 2, 3}");
}

OptimizerSpec angle_spec(int n_mus, int p, const QaoaSettings& st) {
    OptimizerSpec spec;
    spec.max_evals = st.max_evals;
    spec.h = st.fd_step;
    spec.restarts = st.restarts;
    for (int i = 0; i < n_mus; ++i) {
        spec.lower.push_back(0.0);
        spec.upper.push_back(2.0 * kPi);
        spec.init_lower.push_back(0.0);
        spec.init_upper.push_back(st.init_mu_max);
    }
    // beta has period pi; the box is centred on 0 so a descent towards
    // negative beta does not stop on a wall at beta = 0.
    for (int k = 0; k < p; ++k) {
        spec.lower.insert(spec.lower.end(), {0.0, -kPi / 2});
        spec.upper.insert(spec.upper.end(), {2.0 * kPi, kPi / 2});
        spec.init_lower.insert(spec.init_lower.end(), {0.0, -st.init_angle_max});
        spec.init_upper.insert(spec.init_upper.end(), {st.init_angle_max, st.init_angle_max});
    }
    return spec;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Lexicographic: postselected desc, decoded desc, energy asc.
bool ranks_above(const DecodeMetrics& a, const DecodeMetrics& b) {
    if (a.postselected_ratio != b.postselected_ratio) return a.postselected_ratio > b.postselected_ratio;
    if (a.decoded_ratio != b.decoded_ratio) return a.decoded_ratio > b.decoded_ratio;
    return a.energy < b.energy;
}

}  // namespace

StateVector standard_qaoa_state(const DiagonalCost& cost, std::span<const double> angles) {
    StateVector s = prepare_plus(cost.n_qubits);
    apply_layers(s, cost, angles);
    return s;
}

StateVector mub_xrot_state(const DiagonalCost& cost, const DiagonalPhaseCircuit& family,
                           std::span<const double> mus, std::span<const double> angles) {
    StateVector s = prepare_basis(cost.n_qubits, 0);
    apply_rx_all(s, mus);
    apply_family_circuit(s, family);
    apply_layers(s, cost, angles);
    return s;
}

MethodRecord run_standard(const EncodedProblem& problem, int p, std::uint64_t seed, const QaoaSettings& settings) {
    check_inputs(problem, p);
    const auto t0 = std::chrono::steady_clock::now();
    MethodRecord rec;
    rec.method = "standard";
    rec.family = problem.family;
    rec.n = problem.n_qubits;
    rec.p = p;
    rec.seed = seed;

    SeededRng rng(seed, kStandardStream);
    const auto spec = angle_spec(0, p, settings);
    const Objective f = [&](const std::vector<double>& x) {
        return expectation(standard_qaoa_state(problem.cost, x), problem.cost);
    };
    const auto res = minimize(f, spec, rng);
    rec.params = res.x;
    rec.n_cost_evals = res.n_evals;
    rec.metrics = decode_metrics(probabilities(standard_qaoa_state(problem.cost, res.x)), problem);
    rec.runtime_seconds = seconds_since(t0);
    return rec;
}

std::vector<std::uint32_t> family_neighbors(std::uint32_t j, int n) {
    if (n < 1 || n > kMaxFieldDegree) throw InvalidDimension("family_neighbors: n out of range");
    const std::uint32_t r_max = (std::uint32_t{1} << n) - 1;
    std::vector<std::uint32_t> out;
    for (int b = 0; b < n; ++b) {
        const std::uint32_t k = j ^ (std::uint32_t{1} << b);
        if (k >= 1 && k <= r_max) out.push_back(k);
    }
    std::sort(out.begin(), out.end());
    return out;
}

MethodRecord run_adaptive_mub_xrot(const EncodedProblem& problem, int p, std::uint64_t seed,
                                   const QaoaSettings& settings) {
    check_inputs(problem, p);
    const auto t0 = std::chrono::steady_clock::now();
    const int n = problem.n_qubits;
    MethodRecord rec;
    rec.method = "adaptive_mub_xrot";
    rec.family = problem.family;
    rec.n = n;
    rec.p = p;
    rec.seed = seed;

    SeededRng rng(seed, kAdaptiveStream);
    std::map<std::uint32_t, DiagonalPhaseCircuit> phase_cache;
    auto phases = [&](std::uint32_t r) -> const DiagonalPhaseCircuit& {
        auto it = phase_cache.find(r);
        if (it == phase_cache.end()) it = phase_cache.emplace(r, phase_circuit(n, r)).first;
        return it->second;
    };
    auto state = [&](std::uint32_t r, const std::vector<double>& x) {
        const std::span<const double> all(x);
        return mub_xrot_state(problem.cost, phases(r), all.first(n), all.subspan(n));
    };
    auto metrics_at = [&](std::uint32_t r, const std::vector<double>& x) {
        ++rec.n_cost_evals;
        return decode_metrics(probabilities(state(r, x)), problem);
    };
    auto objective_for = [&](std::uint32_t r) -> Objective {
        return [&, r](const std::vector<double>& x) { return expectation(state(r, x), problem.cost); };
    };

    const auto full_spec = angle_spec(n, p, settings);
    auto screen_spec = full_spec;
    screen_spec.max_evals = settings.screen_evals;
    screen_spec.restarts = 1;

    std::vector<double> params(full_spec.dim());
    for (std::size_t i = 0; i < params.size(); ++i) {
        params[i] = rng.uniform(full_spec.init_lower[i], full_spec.init_upper[i]);
    }
    const std::uint32_t r_max = (std::uint32_t{1} << n) - 1;
    std::uint32_t j = std::clamp<std::uint32_t>(settings.start_family, 1, r_max);

    for (int round = 0; round < settings.max_rounds; ++round) {
        const auto neighbors = family_neighbors(j, n);
        if (neighbors.empty()) break;
        const std::size_t trace_start = rec.family_trace.size();
        const auto m_cur = metrics_at(j, params);
        rec.family_trace.push_back({round, j, m_cur.postselected_ratio, m_cur.decoded_ratio, m_cur.energy, false});

        std::vector<std::pair<std::uint32_t, DecodeMetrics>> screened;
        for (auto k : neighbors) {
            const auto m = metrics_at(k, params);
            screened.emplace_back(k, m);
            rec.family_trace.push_back({round, k, m.postselected_ratio, m.decoded_ratio, m.energy, false});
        }
        std::stable_sort(screened.begin(), screened.end(),
                         [](const auto& a, const auto& b) { return ranks_above(a.second, b.second); });
        screened.resize(std::min<std::size_t>(screened.size(), settings.screen_top_k));

        // Equal small budget for the current family and each top candidate.
        auto reoptimize = [&](std::uint32_t r) {
            auto res = minimize(objective_for(r), screen_spec, rng, {params});
            rec.n_cost_evals += res.n_evals;
            return std::make_pair(res.x, metrics_at(r, res.x));
        };
        const auto [cur_x, cur_m] = reoptimize(j);
        std::uint32_t best_r = 0;
        std::vector<double> best_x;
        DecodeMetrics best_m;
        for (const auto& [k, m_screen] : screened) {
            auto [x, m] = reoptimize(k);
            if (best_x.empty() || ranks_above(m, best_m)) {
                best_r = k;
                best_x = std::move(x);
                best_m = m;
            }
        }
        if (!best_x.empty() && best_m.postselected_ratio >= cur_m.postselected_ratio + settings.switch_threshold) {
            for (std::size_t t = trace_start; t < rec.family_trace.size(); ++t) {
                if (rec.family_trace[t].r == best_r) rec.family_trace[t].accepted = true;
            }
            j = best_r;
            params = std::move(best_x);
        } else {
            params = cur_x;
            break;
        }
    }

    auto polish = minimize(objective_for(j), full_spec, rng, {params});
    rec.n_cost_evals += polish.n_evals;
    rec.params = polish.x;
    rec.final_family_r = j;
    rec.metrics = decode_metrics(probabilities(state(j, polish.x)), problem);
    rec.runtime_seconds = seconds_since(t0);
    return rec;
}

double WinTieLoss::non_worse_rate() const {
    const int t = total();
    return t == 0 ? 0.0 : static_cast<double>(wins + ties) / t;
}

WinTieLoss classify_deltas(const std::vector<double>& deltas) {
    WinTieLoss w;
    for (double d : deltas) {
        if (std::abs(d) <= kTieBand) ++w.ties;
        else if (d > 0.0) ++w.wins;
        else ++w.losses;
    }
    return w;
}

bool is_solved(double ratio) { return ratio >= 1.0 - kTieBand; }

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

CaseKey case_key(const MethodRecord& r) { return {to_string(r.family), r.instance_seed, r.n, r.p}; }

PairedComparison paired_stats(const std::vector<MethodRecord>& standard, const std::vector<MethodRecord>& adaptive) {
    std::map<CaseKey, const MethodRecord*> by_std, by_adp;
    for (const auto& r : standard) {
        if (!by_std.emplace(case_key(r), &r).second) throw ContractViolation("paired_stats: duplicate standard case");
    }
    for (const auto& r : adaptive) {
        if (!by_adp.emplace(case_key(r), &r).second) throw ContractViolation("paired_stats: duplicate adaptive case");
    }
    std::string missing;
    auto describe = [](const CaseKey& k) {
        return std::get<0>(k) + "/seed=" + std::to_string(std::get<1>(k)) + "/n=" + std::to_string(std::get<2>(k)) +
               "/p=" + std::to_string(std::get<3>(k));
    };
    for (const auto& [k, r] : by_std) {
        if (!by_adp.count(k)) missing += " " + describe(k) + "(no adaptive)";
    }
    for (const auto& [k, r] : by_adp) {
        if (!by_std.count(k)) missing += " " + describe(k) + "(no standard)";
    }
    if (!missing.empty()) throw ContractViolation("paired_stats: unmatched cases:" + missing);

    PairedComparison c;
    std::vector<double> ratios;
    int solved_std = 0, solved_adp = 0;
    for (const auto& [k, s] : by_std) {
        const MethodRecord* a = by_adp.at(k);
        c.deltas.push_back(a->metrics.decoded_ratio - s->metrics.decoded_ratio);
        solved_std += is_solved(s->metrics.decoded_ratio);
        solved_adp += is_solved(a->metrics.decoded_ratio);
        if (s->runtime_seconds > 0.0) ratios.push_back(a->runtime_seconds / s->runtime_seconds);
    }
    c.wtl = classify_deltas(c.deltas);
    const double n = static_cast<double>(c.deltas.size());
    if (n > 0) {
        c.mean_delta = std::accumulate(c.deltas.begin(), c.deltas.end(), 0.0) / n;
        c.non_worse_rate = c.wtl.non_worse_rate();
        c.solved_rate_standard = solved_std / n;
        c.solved_rate_adaptive = solved_adp / n;
    }
    c.median_runtime_ratio = median(ratios);
    return c;
}

BootstrapCi bootstrap_mean_ci(const std::vector<double>& values, double level, int n_resamples, SeededRng& rng) {
    if (values.empty()) throw ContractViolation("bootstrap_mean_ci: no values");
    if (!(level > 0.0 && level < 1.0) || n_resamples < 1) throw ContractViolation("bootstrap_mean_ci: bad arguments");
    BootstrapCi ci;
    ci.level = level;
    ci.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    std::vector<double> means(n_resamples);
    for (auto& m : means) {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) s += values[rng.uniform_int(0, values.size() - 1)];
        m = s / values.size();
    }
    std::sort(means.begin(), means.end());
    auto quantile = [&](double q) {
        const double pos = q * (means.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, means.size() - 1);
        return means[lo] + (pos - lo) * (means[hi] - means[lo]);
    };
    ci.lower = quantile((1.0 - level) / 2.0);
    ci.upper = quantile(1.0 - (1.0 - level) / 2.0);
    return ci;
}

nlohmann::json to_json(const PairedComparison& c) {
    return {{"paired_cases", c.n_cases()},
            {"wins", c.wtl.wins},
            {"ties", c.wtl.ties},
            {"losses", c.wtl.losses},
            {"mean_delta", c.mean_delta},
            {"non_worse_rate", c.non_worse_rate},
            {"solved_rate_standard", c.solved_rate_standard},
            {"solved_rate_adaptive", c.solved_rate_adaptive},
            {"median_runtime_ratio", c.median_runtime_ratio}};
}

nlohmann::json to_json(const MethodRecord& r) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& s : r.family_trace) {
        trace.push_back({{"round", s.round},
                         {"r", s.r},
                         {"postselected_ratio", s.postselected_ratio},
                         {"decoded_ratio", s.decoded_ratio},
                         {"energy", s.energy},
                         {"accepted", s.accepted}});
    }
    return {{"method", r.method},
            {"family", to_string(r.family)},
            {"instance_seed", r.instance_seed},
            {"n", r.n},
            {"p", r.p},
            {"seed", r.seed},
            {"decoded_ratio", r.metrics.decoded_ratio},
            {"postselected_ratio", r.metrics.postselected_ratio},
            {"energy", r.metrics.energy},
            {"decoded_bitstring", r.metrics.decoded_bitstring},
            {"runtime_s", r.runtime_seconds},
            {"n_cost_evals", r.n_cost_evals},
            {"final_family_r", r.final_family_r},
            {"family_trace", trace}};
}

}  // namespace mublab
