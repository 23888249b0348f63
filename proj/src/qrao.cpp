#include "mublab/qrao.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace mublab {

namespace {

constexpr std::uint64_t kQraoStream = 0x1F83D9ABFB41BD6BULL;
constexpr std::uint64_t kBaselineChild = 0xFFFFFFFF00000000ULL;

struct LayerResult {
    double energy = 0.0;
    Rounding rounding;
    long n_evals = 0;
};

// Alternate exp(-i gamma (-H)) with the chosen mixer from `start`; maximize <H>.
LayerResult optimize_layers(const RelaxedProblem& relaxed, const PauliEvolver& evolver, const StateVector& start,
                            bool z_mixer, int p, SeededRng rng, const QraoSettings& st) {
    OptimizerSpec spec;
    spec.max_evals = st.max_evals;
    spec.h = st.fd_step;
    spec.restarts = st.restarts;
    for (int k = 0; k < p; ++k) {
        spec.lower.insert(spec.lower.end(), {0.0, -kPi / 2});
        spec.upper.insert(spec.upper.end(), {2.0 * kPi, kPi / 2});
        spec.init_lower.insert(spec.init_lower.end(), {0.0, -st.init_angle_max});
        spec.init_upper.insert(spec.init_upper.end(), {st.init_angle_max, st.init_angle_max});
    }
    auto prepare = [&](const std::vector<double>& x) {
        StateVector s = start;
        for (int k = 0; k < p; ++k) {
            evolver.evolve(s, -x[2 * k]);
            if (z_mixer) evolve_zmixer(s, x[2 * k + 1]);
            else evolve_xmixer(s, x[2 * k + 1]);
        }
        return s;
    };
    const Objective f = [&](const std::vector<double>& x) { return -expectation(prepare(x), relaxed.h); };
    const auto res = minimize(f, spec, rng);
    LayerResult out;
    out.energy = -res.value;
    out.n_evals = res.n_evals;
    out.rounding = pauli_round(prepare(res.x), relaxed.encoding, relaxed.graph, relaxed.opt);
    return out;
}

void check_size(const RelaxedProblem& relaxed, int p) {
    if (relaxed.n_qubits() > kMaxPauliExpQubits) throw InvalidDimension("QRAO: at most 10 relaxed qubits supported");
    if (p < 1 || p > 3) throw InvalidDimension("QRAO: depth p must be in {1, 2, 3}");
}

}  // namespace

void QracEncoding::validate(const GraphInstance& g) const {
    if (n_vertices != g.n_vertices || qubit.size() != static_cast<std::size_t>(n_vertices) ||
        axis.size() != static_cast<std::size_t>(n_vertices)) {
        throw ContractViolation("QracEncoding: every vertex must be assigned");
    }
    std::vector<int> load(n_qubits, 0);
    for (int v = 0; v < n_vertices; ++v) {
        if (qubit[v] < 0 || qubit[v] >= n_qubits) throw ContractViolation("QracEncoding: qubit out of range");
        if (axis[v] != 'X' && axis[v] != 'Y' && axis[v] != 'Z') throw ContractViolation("QracEncoding: bad axis");
        if (++load[qubit[v]] > 3) throw ContractViolation("QracEncoding: more than three vertices on a qubit");
    }
    for (int u = 0; u < n_vertices; ++u) {
        for (int v = u + 1; v < n_vertices; ++v) {
            if (qubit[u] == qubit[v] && axis[u] == axis[v]) throw ContractViolation("QracEncoding: repeated axis");
        }
    }
    for (const auto& e : g.edges) {
        if (qubit[e.u] == qubit[e.v]) throw ContractViolation("QracEncoding: adjacent vertices share a qubit");
    }
}

QracEncoding encode_31(const GraphInstance& g) {
    g.validate();
    const auto deg = g.degrees();
    std::vector<int> order(g.n_vertices);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return deg[a] > deg[b]; });

    QracEncoding enc;
    enc.n_vertices = g.n_vertices;
    enc.qubit.assign(g.n_vertices, -1);
    enc.axis.assign(g.n_vertices, '?');
    std::vector<std::vector<int>> members;
    static constexpr char kAxes[3] = {'X', 'Y', 'Z'};
    for (int v : order) {
        std::size_t q = 0;
        for (; q < members.size(); ++q) {
            if (members[q].size() >= 3) continue;
            bool clash = false;
            for (int u : members[q]) clash = clash || g.adjacent(u, v);
            if (!clash) break;
        }
        if (q == members.size()) members.emplace_back();
        enc.qubit[v] = static_cast<int>(q);
        enc.axis[v] = kAxes[members[q].size()];
        members[q].push_back(v);
    }
    enc.n_qubits = static_cast<int>(members.size());
    enc.validate(g);
    return enc;
}

RelaxedProblem relaxed_hamiltonian(const GraphInstance& g, const QracEncoding& enc) {
    enc.validate(g);
    if (g.n_vertices > kMaxBruteForceQubits) throw InvalidDimension("relaxed_hamiltonian: graph too large for brute force");
    RelaxedProblem rp{PauliSum(enc.n_qubits), g, enc, 0.0};
    double offset = 0.0;
    for (const auto& e : g.edges) offset += e.w / 2.0;
    if (!g.edges.empty()) rp.h.add(offset, std::string(enc.n_qubits, 'I'));
    for (const auto& e : g.edges) {
        if (enc.qubit[e.u] == enc.qubit[e.v]) throw ContractViolation("relaxed_hamiltonian: adjacent pair on one qubit");
        std::string word(enc.n_qubits, 'I');
        word[enc.qubit[e.u]] = enc.axis[e.u];
        word[enc.qubit[e.v]] = enc.axis[e.v];
        rp.h.add(-1.5 * e.w, word);
    }
    const std::uint64_t dim = std::uint64_t{1} << g.n_vertices;
    for (std::uint64_t x = 0; x < dim; ++x) rp.opt = std::max(rp.opt, g.cut_value(x));
    return rp;
}

Prescreen prescreen_b0(const RelaxedProblem& relaxed, std::uint32_t r) {
    const int n = relaxed.n_qubits();
    if (n > kMaxPauliExpQubits) throw InvalidDimension("prescreen_b0: at most 10 qubits");
    const auto phases = phase_circuit(n, r);
    Prescreen best;
    bool first = true;
    for (std::uint32_t b = 0; b < (std::uint32_t{1} << n); ++b) {
        StateVector s = prepare_basis(n, b);
        apply_family_circuit(s, phases);
        const double v = expectation(s, relaxed.h);
        if (first || v > best.value) {
            best = {b, v};
            first = false;
        }
    }
    return best;
}

Prescreen prescreen_computational(const RelaxedProblem& relaxed) {
    const int n = relaxed.n_qubits();
    if (n > kMaxPauliExpQubits) throw InvalidDimension("prescreen_computational: at most 10 qubits");
    Prescreen best;
    bool first = true;
    for (std::uint32_t b = 0; b < (std::uint32_t{1} << n); ++b) {
        const double v = expectation(prepare_basis(n, b), relaxed.h);
        if (first || v > best.value) {
            best = {b, v};
            first = false;
        }
    }
    return best;
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::x_variational: return "x_variational";
        case Strategy::mub_r1_b0: return "mub_r1_b0";
        case Strategy::two_pole: return "two_pole";
        case Strategy::bitflip_2pole: return "bitflip_2pole";
        case Strategy::exhaustive_oracle: return "exhaustive_oracle";
        case Strategy::z_variational: return "z_variational";
    }
    return "?";
}

Strategy strategy_from_string(const std::string& s) {
    for (auto t : {Strategy::x_variational, Strategy::mub_r1_b0, Strategy::two_pole, Strategy::bitflip_2pole,
                   Strategy::exhaustive_oracle, Strategy::z_variational}) {
        if (to_string(t) == s) return t;
    }
    throw Error("unknown QRAO strategy '" + s + "'");
}

std::vector<Strategy> headline_strategies() {
    return {Strategy::x_variational, Strategy::mub_r1_b0, Strategy::bitflip_2pole};
}

bool is_mub_strategy(Strategy s) {
    return s == Strategy::mub_r1_b0 || s == Strategy::two_pole || s == Strategy::bitflip_2pole ||
           s == Strategy::exhaustive_oracle;
}

FamilyEvaluator::FamilyEvaluator(const RelaxedProblem& relaxed, int p, std::uint64_t seed, const QraoSettings& settings)
    : relaxed_(relaxed), p_(p), seed_(seed), settings_(settings), evolver_(relaxed.h),
      r_max_((std::uint32_t{1} << relaxed.n_qubits()) - 1) {
    check_size(relaxed, p);
}

const FamilyResult& FamilyEvaluator::operator()(std::uint32_t r) {
    if (r < 1 || r > r_max_) throw InvalidDimension("FamilyEvaluator: r outside [1, 2^n - 1]");
    auto it = memo_.find(r);
    if (it != memo_.end()) return it->second;

    const int n = relaxed_.n_qubits();
    const auto pre = prescreen_b0(relaxed_, r);
    StateVector start = prepare_basis(n, pre.b0);
    apply_family_circuit(start, phase_circuit(n, r));
    const SeededRng rng = SeededRng(seed_, kQraoStream).split(r);
    const auto lr = optimize_layers(relaxed_, evolver_, start, false, p_, rng, settings_);

    FamilyResult fr;
    fr.r = r;
    fr.b0 = pre.b0;
    fr.energy = lr.energy;
    fr.alpha_r = lr.energy / relaxed_.opt;
    fr.alpha_c = lr.rounding.alpha_c;
    fr.rounded = lr.rounding.bitstring;
    fr.n_evals = lr.n_evals;
    trace_.visited.push_back(r);
    return memo_.emplace(r, fr).first->second;
}

std::uint32_t bitflip_local_search(FamilyEvaluator& eval, std::uint32_t start, double threshold) {
    std::uint32_t cur = start;
    eval.trace().pole_starts.push_back(start);
    int n = 0;
    while ((std::uint32_t{1} << n) - 1 < eval.r_max()) ++n;
    while (true) {
        const double here = eval(cur).alpha_r;
        std::uint32_t best = 0;
        double best_score = here + threshold;
        for (auto k : family_neighbors(cur, n)) {
            const double s = eval(k).alpha_r;
            if (s > best_score) {
                best = k;
                best_score = s;
            }
        }
        if (best == 0) return cur;
        eval.trace().moves.emplace_back(cur, best);
        cur = best;
    }
}

double single_qubit_expectation(const StateVector& s, int q, char axis) {
    const std::size_t bit = std::size_t{1} << q;
    double acc = 0.0;
    for (std::size_t x = 0; x < s.size(); ++x) {
        if (x & bit) continue;
        const cplx a0 = s[x];
        const cplx a1 = s[x | bit];
        switch (axis) {
            case 'Z': acc += std::norm(a0) - std::norm(a1); break;
            case 'X': acc += 2.0 * (std::conj(a0) * a1).real(); break;
            case 'Y': acc += 2.0 * (std::conj(a0) * a1).imag(); break;
            default: throw Error("single_qubit_expectation: axis must be X, Y or Z");
        }
    }
    return acc;
}

Rounding pauli_round(const StateVector& state, const QracEncoding& enc, const GraphInstance& g, double opt) {
    if (state.n_qubits() != enc.n_qubits) throw InvalidDimension("pauli_round: state does not match encoding");
    if (!(opt > 0.0)) throw ContractViolation("pauli_round: OPT must be positive");
    Rounding out;
    for (int v = 0; v < enc.n_vertices; ++v) {
        const double e = single_qubit_expectation(state, enc.qubit[v], enc.axis[v]);
        if (std::abs(e) >= 1e-12 && e < 0.0) out.bitstring |= std::uint64_t{1} << v;
    }
    out.alpha_c = g.cut_value(out.bitstring) / opt;
    return out;
}

StrategyRecord run_strategy(const RelaxedProblem& relaxed, Strategy strategy, int p, std::uint64_t seed,
                            const QraoSettings& settings) {
    check_size(relaxed, p);
    const auto t0 = std::chrono::steady_clock::now();
    StrategyRecord rec;
    rec.strategy = strategy;
    rec.graph_seed = relaxed.graph.seed;
    rec.n = relaxed.graph.n_vertices;
    rec.p = p;
    const int nq = relaxed.n_qubits();

    if (strategy == Strategy::x_variational || strategy == Strategy::z_variational) {
        const PauliEvolver evolver(relaxed.h);
        const bool z = strategy == Strategy::z_variational;
        StateVector start = prepare_plus(nq);
        if (z) {
            const auto pre = prescreen_computational(relaxed);
            start = prepare_basis(nq, pre.b0);
            rec.chosen_b0 = pre.b0;
        }
        const SeededRng rng = SeededRng(seed, kQraoStream).split(kBaselineChild + (z ? 1 : 0));
        const auto lr = optimize_layers(relaxed, evolver, start, z, p, rng, settings);
        rec.alpha_r = lr.energy / relaxed.opt;
        rec.alpha_c = lr.rounding.alpha_c;
        rec.family_evals = 0;
    } else {
        FamilyEvaluator eval(relaxed, p, seed, settings);
        switch (strategy) {
            case Strategy::mub_r1_b0: eval(1); break;
            case Strategy::two_pole:
                eval(1);
                eval(eval.r_max());
                break;
            case Strategy::bitflip_2pole:
                bitflip_local_search(eval, 1, settings.improve_threshold);
                bitflip_local_search(eval, eval.r_max(), settings.improve_threshold);
                break;
            case Strategy::exhaustive_oracle:
                for (std::uint32_t r = 1; r <= eval.r_max(); ++r) eval(r);
                break;
            default: throw Error("run_strategy: unknown strategy");
        }
        // Best visited family; ascending r makes ties go to the lowest index.
        std::vector<std::uint32_t> visited = eval.trace().visited;
        std::sort(visited.begin(), visited.end());
        const FamilyResult* best = nullptr;
        for (auto r : visited) {
            const auto& fr = eval(r);
            if (!best || fr.alpha_r > best->alpha_r) best = &fr;
        }
        rec.alpha_r = best->alpha_r;
        rec.alpha_c = best->alpha_c;
        rec.chosen_r = best->r;
        rec.chosen_b0 = best->b0;
        rec.family_evals = eval.n_evaluations();
        rec.trace = eval.trace();
    }
    rec.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::vector<StrategyRecord> strategy_suite(const GraphInstance& g, int p, std::uint64_t seed,
                                           const std::vector<Strategy>& strategies, const QraoSettings& settings) {
    const auto relaxed = relaxed_hamiltonian(g, encode_31(g));
    std::vector<StrategyRecord> out;
    for (auto s : strategies) out.push_back(run_strategy(relaxed, s, p, seed, settings));
    return out;
}

std::vector<StrategySummary> summarize_strategies(const std::vector<StrategyRecord>& records) {
    using Cell = std::tuple<std::uint64_t, int, int>;
    std::map<Cell, double> baseline;
    for (const auto& r : records) {
        if (r.strategy == Strategy::x_variational) {
            if (!baseline.emplace(Cell{r.graph_seed, r.n, r.p}, r.alpha_r).second) {
                throw ContractViolation("summarize_strategies: duplicate x_variational cell");
            }
        }
    }
    std::vector<std::string> order;
    std::map<std::string, std::vector<const StrategyRecord*>> groups;
    for (const auto& r : records) {
        const auto name = to_string(r.strategy);
        if (!groups.count(name)) order.push_back(name);
        groups[name].push_back(&r);
    }
    std::vector<StrategySummary> out;
    for (const auto& name : order) {
        const auto& rs = groups[name];
        StrategySummary s;
        s.strategy = name;
        s.n_cells = rs.size();
        std::vector<double> deltas;
        int solved = 0;
        for (const auto* r : rs) {
            s.mean_alpha_r += r->alpha_r;
            s.mean_alpha_c += r->alpha_c;
            s.mean_family_evals += r->family_evals;
            solved += is_solved(r->alpha_c);
            auto it = baseline.find(Cell{r->graph_seed, r->n, r->p});
            if (it == baseline.end()) throw ContractViolation("summarize_strategies: cell without x_variational baseline");
            deltas.push_back(r->alpha_r - it->second);
        }
        const double n = static_cast<double>(rs.size());
        s.mean_alpha_r /= n;
        s.mean_alpha_c /= n;
        s.mean_family_evals /= n;
        s.solved_rate = solved / n;
        s.wtl = classify_deltas(deltas);
        s.mean_delta_alpha_r = std::accumulate(deltas.begin(), deltas.end(), 0.0) / n;
        out.push_back(s);
    }
    return out;
}

nlohmann::json to_json(const StrategySummary& s) {
    return {{"strategy", s.strategy},
            {"cells", s.n_cells},
            {"mean_alpha_r", s.mean_alpha_r},
            {"mean_alpha_c", s.mean_alpha_c},
            {"mean_delta_alpha_r_vs_x", s.mean_delta_alpha_r},
            {"wins", s.wtl.wins},
            {"ties", s.wtl.ties},
            {"losses", s.wtl.losses},
            {"solved_rate", s.solved_rate},
            {"mean_family_evals", s.mean_family_evals}};
}

nlohmann::json to_json(const StrategyRecord& r) {
    return {{"graph_seed", r.graph_seed}, {"n", r.n},
            {"p", r.p},                   {"strategy", to_string(r.strategy)},
            {"alpha_r", r.alpha_r},       {"alpha_c", r.alpha_c},
            {"family_evals", r.family_evals}, {"chosen_r", r.chosen_r},
            {"chosen_b0", r.chosen_b0},   {"runtime_s", r.runtime_seconds},
            {"visited", r.trace.visited}};
}

}  // namespace mublab
