#include "mublab/width.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <cstdio>
#include <ostream>

namespace mublab {

// ---------------------------------------------------------------- Ensemble

void Ensemble::validate() const {
    if (d < 2) throw InvalidDimension("Ensemble: d must be >= 2");
    if (states.empty()) throw Error("Ensemble: empty ensemble");
    for (const auto& s : states) {
        if (s.dim() != d) throw InvalidDimension("Ensemble: state dimension mismatch");
    }
    if (!labelled()) return;
    if (basis_label.size() != states.size()) throw Error("Ensemble: one label per state required");
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const int a = basis_label[i];
        if (a < 0) throw Error("Ensemble: negative basis label");
        if (static_cast<std::size_t>(a) >= groups.size()) groups.resize(a + 1);
        groups[a].push_back(i);
    }
    for (const auto& g : groups) {
        if (g.size() != static_cast<std::size_t>(d)) throw Error("Ensemble: label group is not a full basis");
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < g.size(); ++j) {
                const double ip = std::abs(states[g[i]].amplitudes().dot(states[g[j]].amplitudes()));
                if (std::abs(ip - (i == j ? 1.0 : 0.0)) > 1e-9) {
                    throw Error("Ensemble: label group is not orthonormal");
                }
            }
    }
}

Ensemble Ensemble::from_states(int d, std::vector<PureState> states, std::string descriptor) {
    Ensemble e;
    e.d = d;
    e.states = std::move(states);
    e.descriptor = std::move(descriptor);
    e.validate();
    return e;
}

Ensemble Ensemble::from_union(const BasisUnion& u, std::string descriptor) {
    Ensemble e;
    e.d = u.dim();
    e.descriptor = std::move(descriptor);
    for (std::size_t a = 0; a < u.bases().size(); ++a) {
        for (int i = 0; i < e.d; ++i) {
            e.states.push_back(PureState::normalized(u.bases()[a].col(i)));
            e.basis_label.push_back(static_cast<int>(a));
        }
    }
    e.validate();
    return e;
}

Ensemble Ensemble::from_mub(const MubSystem& sys) {
    return from_union(BasisUnion::from_mub(sys), "complete_mub_d" + std::to_string(sys.d));
}

// ----------------------------------------------------------- SimplexFrame

SimplexFrame SimplexFrame::make(int d) {
    if (d < 2) throw InvalidDimension("SimplexFrame: d must be >= 2");
    // Orthonormal basis of the sum-zero hyperplane (Helmert columns); row i of
    // the coordinate matrix is e_i - 1/d projected into that basis.
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(d, d - 1);
    for (int k = 1; k < d; ++k) {
        const double norm = std::sqrt(static_cast<double>(k * (k + 1)));
        for (int i = 0; i < k; ++i) basis(i, k - 1) = 1.0 / norm;
        basis(k, k - 1) = -static_cast<double>(k) / norm;
    }
    SimplexFrame f;
    f.d = d;
    f.vertices = basis;  // e_i . basis_col = basis(i, col); columns are sum-zero
    return f;
}

double SimplexFrame::support(const Eigen::VectorXd& y) const { return (vertices * y).maxCoeff(); }

// --------------------------------------------------------- sampling engine

namespace {

// Real coordinates of a Hermitian matrix in which Tr(AB) is a dot product:
// [A_jj ; sqrt2 Re A_jk ; sqrt2 Im A_jk (j<k)].
Eigen::VectorXd hermitian_features(const CMatrix& a) {
    const Eigen::Index d = a.rows();
    Eigen::VectorXd f(d * d);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < d; ++j) f[k++] = a(j, j).real();
    const double r2 = std::numbers::sqrt2;
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index l = j + 1; l < d; ++l) {
            f[k++] = r2 * a(j, l).real();
            f[k++] = r2 * a(j, l).imag();
        }
    return f;
}

// Rows are the features of Q_psi for each state, so table * h = (Tr(H Q_psi))_psi.
Eigen::MatrixXd q_table(const Ensemble& ens) {
    ens.validate();
    Eigen::MatrixXd t(static_cast<Eigen::Index>(ens.size()), ens.d * ens.d);
    for (std::size_t i = 0; i < ens.size(); ++i)
        t.row(static_cast<Eigen::Index>(i)) = hermitian_features(q_operator(ens.states[i]).matrix()).transpose();
    return t;
}

// Drives chunked sampling. For every Hamiltonian draw, `Acc::add` receives the
// vector of Tr(H Q_psi) per table and the chunk generator (for auxiliary
// draws). Chunk accumulators are merged in chunk order.
template <class Acc, class MakeAcc>
Acc run_chunks(int d, const std::vector<Eigen::MatrixXd>& tables, std::size_t n_samples, const SeededRng& rng,
               int workers, MakeAcc make_acc) {
    if (n_samples == 0) throw Error("width sampler: n_samples must be positive");
    const std::size_t n_chunks = (n_samples + kWidthChunk - 1) / kWidthChunk;
    std::vector<Acc> partial;
    partial.reserve(n_chunks);
    for (std::size_t c = 0; c < n_chunks; ++c) partial.push_back(make_acc());
    parallel_for(n_chunks, workers, [&](std::size_t c) {
        SeededRng chunk_rng = rng.split(c);
        SeededRng aux_rng = chunk_rng.split(0xA5A5);
        const std::size_t begin = c * kWidthChunk;
        const std::size_t end = std::min(n_samples, begin + kWidthChunk);
        std::vector<Eigen::VectorXd> values(tables.size());
        for (std::size_t s = begin; s < end; ++s) {
            const auto h = sample_isotropic_traceless(d, chunk_rng);
            const Eigen::VectorXd f = hermitian_features(h.matrix());
            for (std::size_t t = 0; t < tables.size(); ++t) values[t].noalias() = tables[t] * f;
            partial[c].add(values, aux_rng);
        }
    });
    Acc total = make_acc();
    for (auto& p : partial) total.merge(p);
    return total;
}

struct ExtremaAcc {
    std::vector<RunningStats> max_stats, min_stats, diff_stats;  // diff: table t vs table 0

    explicit ExtremaAcc(std::size_t n) : max_stats(n), min_stats(n), diff_stats(n) {}

    void add(const std::vector<Eigen::VectorXd>& v, SeededRng&) {
        const double ref = v[0].maxCoeff();
        for (std::size_t t = 0; t < v.size(); ++t) {
            const double mx = v[t].maxCoeff();
            max_stats[t].add(mx);
            min_stats[t].add(v[t].minCoeff());
            diff_stats[t].add(mx - ref);
        }
    }
    void merge(const ExtremaAcc& o) {
        for (std::size_t t = 0; t < max_stats.size(); ++t) {
            max_stats[t].merge(o.max_stats[t]);
            min_stats[t].merge(o.min_stats[t]);
            diff_stats[t].merge(o.diff_stats[t]);
        }
    }
};

WidthReport make_report(const EstimateWithError& e, const std::string& desc, std::size_t n, const SeededRng& rng) {
    return {e, desc, n, rng.seed(), rng.stream_id()};
}

int common_dim(const std::vector<const Ensemble*>& ens) {
    const int d = ens.front()->d;
    for (const auto* e : ens)
        if (e->d != d) throw InvalidDimension("width: ensembles of different dimension");
    return d;
}

}  // namespace

WidthReport estimate_width(const Ensemble& ens, std::size_t n_samples, const SeededRng& rng, int workers) {
    if (ens.states.empty()) throw Error("estimate_width: empty ensemble");
    const std::vector<Eigen::MatrixXd> tables{q_table(ens)};
    const auto acc = run_chunks<ExtremaAcc>(ens.d, tables, n_samples, rng, workers, [] { return ExtremaAcc(1); });
    return make_report(acc.max_stats[0].estimate(), ens.descriptor, n_samples, rng);
}

WidthReport estimate_min_expectation(const Ensemble& ens, std::size_t n_samples, const SeededRng& rng,
                                     int workers) {
    if (ens.states.empty()) throw Error("estimate_min_expectation: empty ensemble");
    const std::vector<Eigen::MatrixXd> tables{q_table(ens)};
    const auto acc = run_chunks<ExtremaAcc>(ens.d, tables, n_samples, rng, workers, [] { return ExtremaAcc(1); });
    return make_report(acc.min_stats[0].estimate(), ens.descriptor, n_samples, rng);
}

std::size_t PairedWidthComparison::n_violations() const {
    return static_cast<std::size_t>(std::count(violation.begin(), violation.end(), true));
}

PairedWidthComparison compare_widths(const Ensemble& reference, const std::vector<Ensemble>& others,
                                     std::size_t n_samples, const SeededRng& rng, int workers, double sigmas) {
    std::vector<const Ensemble*> all{&reference};
    for (const auto& o : others) all.push_back(&o);
    const int d = common_dim(all);
    std::vector<Eigen::MatrixXd> tables;
    for (const auto* e : all) tables.push_back(q_table(*e));
    const std::size_t n = tables.size();
    const auto acc = run_chunks<ExtremaAcc>(d, tables, n_samples, rng, workers, [n] { return ExtremaAcc(n); });

    PairedWidthComparison out;
    out.sigmas = sigmas;
    out.reference = make_report(acc.max_stats[0].estimate(), reference.descriptor, n_samples, rng);
    for (std::size_t t = 1; t < n; ++t) {
        out.others.push_back(make_report(acc.max_stats[t].estimate(), others[t - 1].descriptor, n_samples, rng));
        const auto diff = acc.diff_stats[t].estimate();
        out.differences.push_back(diff);
        out.violation.push_back(diff.mean > sigmas * diff.std_error);
    }
    return out;
}

std::vector<double> default_cdf_grid(double t_max, double step) {
    std::vector<double> g;
    const auto n = static_cast<int>(std::llround(t_max / step));
    for (int i = 0; i <= n; ++i) g.push_back(i * step);
    return g;
}

namespace {

struct CdfAcc {
    const std::vector<double>* grid;
    std::vector<std::vector<std::size_t>> bucket;  // [table][first grid index with t >= M]
    std::size_t n = 0;

    CdfAcc(const std::vector<double>* g, std::size_t n_tables)
        : grid(g), bucket(n_tables, std::vector<std::size_t>(g->size() + 1, 0)) {}

    void add(const std::vector<Eigen::VectorXd>& v, SeededRng&) {
        ++n;
        for (std::size_t t = 0; t < v.size(); ++t) {
            const double mx = v[t].maxCoeff();
            const auto it = std::lower_bound(grid->begin(), grid->end(), mx);
            ++bucket[t][static_cast<std::size_t>(it - grid->begin())];
        }
    }
    void merge(const CdfAcc& o) {
        n += o.n;
        for (std::size_t t = 0; t < bucket.size(); ++t)
            for (std::size_t i = 0; i < bucket[t].size(); ++i) bucket[t][i] += o.bucket[t][i];
    }
};

}  // namespace

std::vector<CdfCurve> max_cdfs(const std::vector<Ensemble>& ensembles, const std::vector<double>& grid,
                               std::size_t n_samples, const SeededRng& rng, int workers) {
    if (ensembles.empty()) throw Error("max_cdfs: no ensembles");
    if (grid.empty() || !std::is_sorted(grid.begin(), grid.end()) ||
        std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
        throw Error("max_cdf: grid must be strictly increasing");
    }
    std::vector<const Ensemble*> all;
    for (const auto& e : ensembles) all.push_back(&e);
    const int d = common_dim(all);
    std::vector<Eigen::MatrixXd> tables;
    for (const auto& e : ensembles) tables.push_back(q_table(e));
    const std::size_t nt = tables.size();
    const auto acc = run_chunks<CdfAcc>(d, tables, n_samples, rng, workers, [&] { return CdfAcc(&grid, nt); });

    std::vector<CdfCurve> out;
    for (std::size_t t = 0; t < nt; ++t) {
        CdfCurve c;
        c.grid = grid;
        c.n_samples = acc.n;
        std::size_t cum = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            cum += acc.bucket[t][i];  // samples with M <= grid[i]
            const double p = static_cast<double>(cum) / static_cast<double>(acc.n);
            c.probs.push_back(p);
            c.std_errors.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(acc.n)));
        }
        out.push_back(std::move(c));
    }
    return out;
}

CdfCurve max_cdf(const Ensemble& ens, const std::vector<double>& grid, std::size_t n_samples, const SeededRng& rng,
                 int workers) {
    return max_cdfs({ens}, grid, n_samples, rng, workers).front();
}

DominanceReport dominance_check(const CdfCurve& s, const CdfCurve& m, double slack_sigmas) {
    if (s.grid != m.grid) throw Error("dominance_check: curves are on different grids");
    DominanceReport rep;
    rep.slack_sigmas = slack_sigmas;
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        const double slack = slack_sigmas * std::hypot(s.std_errors[i], m.std_errors[i]);
        if (s.probs[i] < m.probs[i] - slack) rep.violations.push_back({s.grid[i], s.probs[i], m.probs[i], slack});
    }
    return rep;
}

// ---------------------------------------------------------- simplex blocks

namespace {

struct CovAcc {
    Eigen::MatrixXd sum, sum_sq;
    double max_block_sum = 0.0;
    std::size_t n = 0;
    int d;

    CovAcc(Eigen::Index m, int d_) : sum(Eigen::MatrixXd::Zero(m, m)), sum_sq(Eigen::MatrixXd::Zero(m, m)), d(d_) {}

    void add(const std::vector<Eigen::VectorXd>& v, SeededRng&) {
        const auto& x = v[0];
        ++n;
        const Eigen::MatrixXd prod = x * x.transpose();
        sum += prod;
        sum_sq += prod.cwiseAbs2();
        for (Eigen::Index a = 0; a < x.size() / d; ++a)
            max_block_sum = std::max(max_block_sum, std::abs(x.segment(a * d, d).sum()));
    }
    void merge(const CovAcc& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        n += o.n;
        max_block_sum = std::max(max_block_sum, o.max_block_sum);
    }
};

}  // namespace

SimplexBlocksReport simplex_blocks(const Ensemble& ens, std::size_t n_samples, const SeededRng& rng, int workers) {
    if (!ens.labelled()) throw Error("simplex_blocks: ensemble must be basis-labelled");
    ens.validate();
    // Order states block by block.
    Ensemble sorted = ens;
    std::vector<std::size_t> order(ens.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ens.basis_label[a] < ens.basis_label[b]; });
    sorted.states.clear();
    sorted.basis_label.clear();
    for (auto i : order) {
        sorted.states.push_back(ens.states[i]);
        sorted.basis_label.push_back(ens.basis_label[i]);
    }
    const int d = ens.d;
    const auto m = static_cast<Eigen::Index>(sorted.size());
    const int nb = static_cast<int>(m / d);
    const std::vector<Eigen::MatrixXd> tables{q_table(sorted)};
    const auto acc = run_chunks<CovAcc>(d, tables, n_samples, rng, workers, [&] { return CovAcc(m, d); });

    // X has mean zero exactly, so Cov = E[X_i X_j] and its standard error is
    // the standard error of the product mean.
    const double n = static_cast<double>(acc.n);
    SimplexBlocksReport rep;
    rep.d = d;
    rep.n_blocks = nb;
    rep.n_samples = acc.n;
    rep.covariance = acc.sum / n;
    rep.covariance_stderr =
        ((acc.sum_sq / n - rep.covariance.cwiseAbs2()).cwiseMax(0.0) / std::max(1.0, n - 1.0)).cwiseSqrt();
    rep.max_block_sum = acc.max_block_sum;
    rep.cross_block_cov_norms = Eigen::MatrixXd::Zero(nb, nb);
    rep.cross_block_max_sigmas = Eigen::MatrixXd::Zero(nb, nb);
    rep.cross_block_simplex_norms = Eigen::MatrixXd::Zero(nb, nb);
    const SimplexFrame frame = SimplexFrame::make(d);
    const double floor_se = 1e-15;
    for (int a = 0; a < nb; ++a) {
        for (int b = 0; b < nb; ++b) {
            const auto block = rep.covariance.block(a * d, b * d, d, d);
            const auto se = rep.covariance_stderr.block(a * d, b * d, d, d);
            if (a == b) {
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) {
                        const double target = (i == j ? 1.0 : 0.0) - 1.0 / d;
                        const double err = std::abs(block(i, j) - target);
                        rep.within_block_cov_error = std::max(rep.within_block_cov_error, err);
                        rep.within_block_max_sigmas =
                            std::max(rep.within_block_max_sigmas, err / std::max(se(i, j), floor_se));
                    }
                continue;
            }
            rep.cross_block_cov_norms(a, b) = block.cwiseAbs().maxCoeff();
            rep.cross_block_max_sigmas(a, b) =
                (block.cwiseAbs().array() / se.array().max(floor_se)).maxCoeff();
            rep.cross_block_simplex_norms(a, b) = (frame.vertices.transpose() * block * frame.vertices).norm();
        }
    }
    return rep;
}

SimplexBlocksReport simplex_blocks(const BasisUnion& u, std::size_t n_samples, const SeededRng& rng, int workers) {
    return simplex_blocks(Ensemble::from_union(u, "union"), n_samples, rng, workers);
}

bool SimplexBlocksReport::within_blocks_ok(double sigmas) const {
    return within_block_max_sigmas <= sigmas || within_block_cov_error <= tol::kExact;
}

bool SimplexBlocksReport::independent_blocks(double sigmas) const {
    return within_blocks_ok(sigmas) && (n_blocks < 2 || cross_block_max_sigmas.maxCoeff() <= sigmas);
}

// ------------------------------------------------------------------ radial

RadialSpec RadialSpec::constant(double c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw Error("RadialSpec: constant must be finite and >= 0");
    return {Kind::constant, c};
}
RadialSpec RadialSpec::half_normal() { return {Kind::half_normal, 0.0}; }
RadialSpec RadialSpec::uniform01() { return {Kind::uniform01, 0.0}; }

double RadialSpec::mean() const {
    switch (kind) {
        case Kind::constant: return value;
        case Kind::half_normal: return std::sqrt(2.0 / std::numbers::pi);
        case Kind::uniform01: return 0.5;
    }
    return 0.0;
}

double RadialSpec::sample(SeededRng& rng) const {
    switch (kind) {
        case Kind::constant: return value;
        case Kind::half_normal: return std::abs(rng.normal());
        case Kind::uniform01: return rng.uniform();
    }
    return 0.0;
}

std::string RadialSpec::name() const {
    switch (kind) {
        case Kind::constant: return "constant(" + std::to_string(value) + ")";
        case Kind::half_normal: return "half_normal";
        case Kind::uniform01: return "uniform01";
    }
    return "?";
}

namespace {

struct RadialAcc {
    RadialSpec spec;
    double mean_r;
    RunningStats lhs, base, diff;

    void add(const std::vector<Eigen::VectorXd>& v, SeededRng& aux) {
        const double m = v[0].maxCoeff();
        const double r = spec.sample(aux);
        lhs.add(r * m);
        base.add(m);
        diff.add((r - mean_r) * m);
    }
    void merge(const RadialAcc& o) {
        lhs.merge(o.lhs);
        base.merge(o.base);
        diff.merge(o.diff);
    }
};

}  // namespace

RadialReport radial_width(const Ensemble& ens, const RadialSpec& radial, std::size_t n_samples, const SeededRng& rng,
                          int workers) {
    if (radial.kind == RadialSpec::Kind::constant && !(radial.value >= 0.0)) {
        throw Error("radial_width: R must be nonnegative");
    }
    const std::vector<Eigen::MatrixXd> tables{q_table(ens)};
    const double er = radial.mean();
    const auto acc = run_chunks<RadialAcc>(ens.d, tables, n_samples, rng, workers,
                                           [&] { return RadialAcc{radial, er, {}, {}, {}}; });
    RadialReport rep;
    rep.radial = radial.name();
    rep.lhs = acc.lhs.estimate();
    const auto base = acc.base.estimate();
    rep.rhs = {er * base.mean, er * base.std_error, base.n_samples};
    rep.difference = acc.diff.estimate();
    rep.difference.mean = rep.lhs.mean - rep.rhs.mean;
    rep.pass = std::abs(rep.difference.mean) <= tol::kMcSigmas * rep.difference.std_error + 1e-12;
    return rep;
}

// -------------------------------------------------------------- octahedron

OctahedronReport octahedron_trial(std::size_t n_ensembles, std::size_t n_samples, const SeededRng& rng, int workers) {
    const Ensemble mub = Ensemble::from_mub(build_prime_mub(2));
    SeededRng state_rng = rng.split(0x0C7A);
    std::vector<Ensemble> random;
    for (std::size_t e = 0; e < n_ensembles; ++e) {
        std::vector<PureState> states;
        for (int k = 0; k < 6; ++k) states.push_back(haar_state(2, state_rng));
        random.push_back(Ensemble::from_states(2, std::move(states), "haar6_" + std::to_string(e)));
    }
    const auto cmp = compare_widths(mub, random, n_samples, rng, workers);
    OctahedronReport rep;
    rep.mub_width = cmp.reference;
    for (std::size_t e = 0; e < n_ensembles; ++e) {
        rep.ensemble_widths.push_back(cmp.others[e].estimate);
        rep.differences.push_back(cmp.differences[e]);
    }
    rep.n_violations = cmp.n_violations();
    return rep;
}

// ------------------------------------------------------------ gap probe

GapReport asymptotic_gap(int n_qubits, std::size_t n_samples, const SeededRng& rng, int workers) {
    if (n_qubits < 1 || n_qubits > 4) throw InvalidDimension("asymptotic_gap: n_qubits must be in [1, 4]");
    if (n_samples == 0) throw Error("asymptotic_gap: n_samples must be positive");
    const int d = 1 << n_qubits;
    const int blocks = d + 1;
    struct Acc {
        RunningStats iid, mub, gap;
        void merge(const Acc& o) {
            iid.merge(o.iid);
            mub.merge(o.mub);
            gap.merge(o.gap);
        }
    };
    const std::size_t n_chunks = (n_samples + kWidthChunk - 1) / kWidthChunk;
    std::vector<Acc> partial(n_chunks);
    parallel_for(n_chunks, workers, [&](std::size_t c) {
        SeededRng g = rng.split(c);
        const std::size_t begin = c * kWidthChunk;
        const std::size_t end = std::min(n_samples, begin + kWidthChunk);
        std::vector<double> z(static_cast<std::size_t>(d));
        for (std::size_t s = begin; s < end; ++s) {
            double iid_max = -std::numeric_limits<double>::infinity();
            double mub_max = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < blocks; ++a) {
                double sum = 0.0, zmax = -std::numeric_limits<double>::infinity();
                for (int i = 0; i < d; ++i) {
                    z[i] = g.normal();
                    sum += z[i];
                    zmax = std::max(zmax, z[i]);
                }
                iid_max = std::max(iid_max, zmax);
                mub_max = std::max(mub_max, zmax - sum / d);
            }
            partial[c].iid.add(iid_max);
            partial[c].mub.add(mub_max);
            partial[c].gap.add(iid_max - mub_max);
        }
    });
    Acc total;
    for (const auto& p : partial) total.merge(p);
    GapReport rep;
    rep.n_qubits = n_qubits;
    rep.d = d;
    rep.n_points = d * (d + 1);
    rep.m_n_hat = total.iid.estimate();
    rep.w_m_hat = total.mub.estimate();
    rep.gap = total.gap.estimate();
    rep.reference = std::sqrt(std::log(static_cast<double>(d))) / d;
    return rep;
}

// --------------------------------------------------------- serialization

nlohmann::json to_json(const EstimateWithError& e) {
    return {{"mean", e.mean}, {"stderr", e.std_error}, {"n_samples", e.n_samples}};
}

nlohmann::json to_json(const WidthReport& r) {
    return {{"estimate", to_json(r.estimate)}, {"ensemble", r.descriptor}, {"n_samples", r.n_samples},
            {"seed", r.seed}, {"stream_id", r.stream_id}};
}

nlohmann::json to_json(const PairedWidthComparison& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < r.others.size(); ++i) {
        rows.push_back({{"width", to_json(r.others[i])}, {"difference", to_json(r.differences[i])},
                        {"violation", static_cast<bool>(r.violation[i])}});
    }
    return {{"reference", to_json(r.reference)}, {"comparisons", rows}, {"sigmas", r.sigmas},
            {"n_violations", r.n_violations()}, {"pass", r.n_violations() == 0}};
}

nlohmann::json to_json(const DominanceReport& r) {
    nlohmann::json v = nlohmann::json::array();
    for (const auto& x : r.violations) v.push_back({{"t", x.t}, {"prob_s", x.prob_s}, {"prob_m", x.prob_m}, {"slack", x.slack}});
    return {{"violations", v}, {"slack_sigmas", r.slack_sigmas}, {"pass", r.pass()}};
}

namespace {
nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}
}  // namespace

nlohmann::json to_json(const SimplexBlocksReport& r) {
    return {{"d", r.d},
            {"n_blocks", r.n_blocks},
            {"n_samples", r.n_samples},
            {"within_block_cov_error", r.within_block_cov_error},
            {"within_block_max_sigmas", r.within_block_max_sigmas},
            {"cross_block_cov_norms", matrix_json(r.cross_block_cov_norms)},
            {"cross_block_max_sigmas", matrix_json(r.cross_block_max_sigmas)},
            {"cross_block_simplex_norms", matrix_json(r.cross_block_simplex_norms)},
            {"max_block_sum", r.max_block_sum},
            {"pass", r.independent_blocks()}};
}

nlohmann::json to_json(const RadialReport& r) {
    return {{"radial", r.radial}, {"lhs", to_json(r.lhs)}, {"rhs", to_json(r.rhs)},
            {"difference", to_json(r.difference)}, {"pass", r.pass}};
}

nlohmann::json to_json(const OctahedronReport& r) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& d : r.differences) worst = std::max(worst, d.mean);
    return {{"mub_width", to_json(r.mub_width)}, {"n_ensembles", r.ensemble_widths.size()},
            {"max_difference", worst}, {"n_violations", r.n_violations}, {"pass", r.pass()}};
}

nlohmann::json to_json(const GapReport& r) {
    return {{"n_qubits", r.n_qubits}, {"d", r.d}, {"N", r.n_points}, {"m_N_hat", to_json(r.m_n_hat)},
            {"W_M_hat", to_json(r.w_m_hat)}, {"gap", to_json(r.gap)}, {"reference", r.reference}};
}

void write_cdf_csv(std::ostream& os, const CdfCurve& curve) {
    os << "t,prob,stderr\n";
    char buf[96];
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f,%.10f,%.10f\n", curve.grid[i], curve.probs[i], curve.std_errors[i]);
        os << buf;
    }
}

}  // namespace mublab
