#include "mublab/problems.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mublab {

namespace {

constexpr std::uint64_t kGraphStream = 0x6A09E667F3BCC908ULL;
constexpr std::uint64_t kKnapsackStream = 0xBB67AE8584CAA73BULL;
constexpr std::uint64_t kVertexWeightStream = 0x3C6EF372FE94F82BULL;

bool bit(std::uint64_t x, int i) { return (x >> i) & 1U; }

void require_qubits(int n, const char* where) {
    if (n < 1 || n > kMaxBruteForceQubits) {
        throw InvalidDimension(std::string(where) + ": qubit count must be in [1, 20]");
    }
}

void finish(EncodedProblem& p) {
    const auto bf = brute_force(p);
    if (!(bf.opt_value > 0.0)) throw ContractViolation("encode: optimum must be positive");
    p.opt_value = bf.opt_value;
    p.opt_bitstring = bf.opt_bitstring;
}

}  // namespace

std::string to_string(ProblemFamily f) {
    switch (f) {
        case ProblemFamily::maxcut: return "maxcut";
        case ProblemFamily::wmaxcut: return "wmaxcut";
        case ProblemFamily::mis: return "mis";
        case ProblemFamily::wmis: return "wmis";
        case ProblemFamily::knapsack: return "knapsack";
    }
    return "?";
}

ProblemFamily family_from_string(const std::string& s) {
    for (auto f : all_families()) {
        if (to_string(f) == s) return f;
    }
    throw Error("unknown problem family '" + s + "'");
}

std::vector<ProblemFamily> all_families() {
    return {ProblemFamily::maxcut, ProblemFamily::wmaxcut, ProblemFamily::mis, ProblemFamily::wmis,
            ProblemFamily::knapsack};
}

void GraphInstance::validate() const {
    if (n_vertices < 1) throw InvalidDimension("GraphInstance: need at least one vertex");
    for (const auto& e : edges) {
        if (e.u == e.v) throw ContractViolation("GraphInstance: self-loop");
        if (e.u > e.v) throw ContractViolation("GraphInstance: edges must satisfy u < v");
        if (e.u < 0 || e.v >= n_vertices) throw ContractViolation("GraphInstance: vertex out of range");
        if (!(e.w > 0.0) || !std::isfinite(e.w)) throw ContractViolation("GraphInstance: weights must be positive");
    }
    if (!vertex_weights.empty()) {
        if (vertex_weights.size() != static_cast<std::size_t>(n_vertices)) {
            throw ContractViolation("GraphInstance: one vertex weight per vertex");
        }
        for (double w : vertex_weights) {
            if (!(w > 0.0)) throw ContractViolation("GraphInstance: vertex weights must be positive");
        }
    }
}

double GraphInstance::vertex_weight(int v) const { return vertex_weights.empty() ? 1.0 : vertex_weights[v]; }

std::vector<int> GraphInstance::degrees() const {
    std::vector<int> deg(n_vertices, 0);
    for (const auto& e : edges) {
        ++deg[e.u];
        ++deg[e.v];
    }
    return deg;
}

bool GraphInstance::adjacent(int u, int v) const {
    if (u > v) std::swap(u, v);
    for (const auto& e : edges) {
        if (e.u == u && e.v == v) return true;
    }
    return false;
}

double GraphInstance::cut_value(std::uint64_t x) const {
    double c = 0.0;
    for (const auto& e : edges) {
        if (bit(x, e.u) != bit(x, e.v)) c += e.w;
    }
    return c;
}

void KnapsackInstance::validate() const {
    if (values.empty() || values.size() != weights.size()) throw ContractViolation("KnapsackInstance: item lists");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] <= 0 || weights[i] <= 0) throw ContractViolation("KnapsackInstance: values/weights must be positive");
    }
    if (capacity < 0) throw ContractViolation("KnapsackInstance: negative capacity");
    int need = 0;
    while ((1 << need) < capacity + 1) ++need;
    if (n_slack_bits != need) throw ContractViolation("KnapsackInstance: slack bits must equal ceil(log2(capacity+1))");
}

GraphInstance gen_er_graph(int n, double edge_prob, std::uint64_t seed, bool weighted) {
    if (n < 2) throw InvalidDimension("gen_er_graph: n >= 2 required");
    if (!(edge_prob > 0.0 && edge_prob <= 1.0)) throw ContractViolation("gen_er_graph: edge_prob in (0, 1]");
    for (std::uint64_t attempt = 0;; ++attempt) {
        SeededRng rng(seed + attempt, kGraphStream);
        GraphInstance g;
        g.n_vertices = n;
        g.seed = seed;
        g.family = weighted ? ProblemFamily::wmaxcut : ProblemFamily::maxcut;
        for (int u = 0; u < n; ++u) {
            for (int v = u + 1; v < n; ++v) {
                if (rng.uniform() < edge_prob) {
                    const double w = weighted ? static_cast<double>(rng.uniform_int(1, kMaxWeight)) : 1.0;
                    g.edges.push_back({u, v, w});
                }
            }
        }
        if (!g.edges.empty()) return g;
    }
}

KnapsackInstance gen_knapsack(int n_qubits, std::uint64_t seed) {
    if (n_qubits < 2) throw InvalidDimension("gen_knapsack: need at least two qubits");
    const int s = std::max(1, n_qubits / 3);
    const int k = n_qubits - s;
    const int cap = (1 << s) - 1;
    for (std::uint64_t attempt = 0;; ++attempt) {
        SeededRng rng(seed + attempt, kKnapsackStream);
        KnapsackInstance inst;
        inst.capacity = cap;
        inst.n_slack_bits = s;
        inst.seed = seed;
        for (int i = 0; i < k; ++i) {
            inst.weights.push_back(static_cast<int>(rng.uniform_int(1, cap)));
            inst.values.push_back(static_cast<int>(rng.uniform_int(1, kMaxWeight)));
        }
        bool any_fits = false;
        for (int w : inst.weights) any_fits = any_fits || w <= cap;
        if (any_fits) return inst;
    }
}

EncodedProblem make_benchmark_problem(ProblemFamily family, int n, std::uint64_t seed) {
    switch (family) {
        case ProblemFamily::maxcut: return encode_maxcut(gen_er_graph(n, 0.5, seed, false));
        case ProblemFamily::wmaxcut: return encode_maxcut(gen_er_graph(n, 0.5, seed, true));
        case ProblemFamily::mis:
        case ProblemFamily::wmis: {
            GraphInstance g = gen_er_graph(n, 0.5, seed, false);
            g.family = family;
            if (family == ProblemFamily::wmis) {
                SeededRng rng(seed, kVertexWeightStream);
                for (int v = 0; v < n; ++v) g.vertex_weights.push_back(static_cast<double>(rng.uniform_int(1, kMaxWeight)));
            }
            return encode_mis(g);
        }
        case ProblemFamily::knapsack: return encode_knapsack(gen_knapsack(n, seed));
    }
    throw Error("make_benchmark_problem: unknown family");
}

EncodedProblem encode_maxcut(const GraphInstance& g) {
    g.validate();
    require_qubits(g.n_vertices, "encode_maxcut");
    EncodedProblem p;
    p.family = g.family == ProblemFamily::wmaxcut ? ProblemFamily::wmaxcut : ProblemFamily::maxcut;
    p.n_qubits = g.n_vertices;
    const std::size_t dim = std::size_t{1} << g.n_vertices;
    std::vector<double> c(dim);
    for (std::size_t x = 0; x < dim; ++x) c[x] = -g.cut_value(x);
    p.cost = DiagonalCost(g.n_vertices, std::move(c), to_string(p.family));
    p.feasible = [](std::uint64_t) { return true; };
    p.objective = [g](std::uint64_t x) { return g.cut_value(x); };
    p.instance = to_json(g);
    finish(p);
    return p;
}

EncodedProblem encode_mis(const GraphInstance& g) {
    g.validate();
    require_qubits(g.n_vertices, "encode_mis");
    EncodedProblem p;
    p.family = g.vertex_weights.empty() ? ProblemFamily::mis : ProblemFamily::wmis;
    if (g.family == ProblemFamily::wmis) p.family = ProblemFamily::wmis;
    p.n_qubits = g.n_vertices;
    double wmax = 0.0;
    for (int v = 0; v < g.n_vertices; ++v) wmax = std::max(wmax, g.vertex_weight(v));
    const double lambda = 1.0 + wmax;

    auto independent = [g](std::uint64_t x) {
        for (const auto& e : g.edges) {
            if (bit(x, e.u) && bit(x, e.v)) return false;
        }
        return true;
    };
    auto weight = [g](std::uint64_t x) {
        double s = 0.0;
        for (int v = 0; v < g.n_vertices; ++v) {
            if (bit(x, v)) s += g.vertex_weight(v);
        }
        return s;
    };
    const std::size_t dim = std::size_t{1} << g.n_vertices;
    std::vector<double> c(dim);
    for (std::size_t x = 0; x < dim; ++x) {
        int violations = 0;
        for (const auto& e : g.edges) violations += bit(x, e.u) && bit(x, e.v);
        c[x] = -weight(x) + lambda * violations;
    }
    p.cost = DiagonalCost(g.n_vertices, std::move(c), to_string(p.family));
    p.feasible = independent;
    p.objective = [independent, weight](std::uint64_t x) { return independent(x) ? weight(x) : 0.0; };
    p.instance = to_json(g);
    p.instance["family"] = to_string(p.family);
    finish(p);
    return p;
}

EncodedProblem encode_knapsack(const KnapsackInstance& k) {
    k.validate();
    require_qubits(k.n_qubits(), "encode_knapsack");
    bool any_fits = false;
    for (int w : k.weights) any_fits = any_fits || w <= k.capacity;
    if (!any_fits) throw ContractViolation("encode_knapsack: every item exceeds the capacity");

    EncodedProblem p;
    p.family = ProblemFamily::knapsack;
    p.n_qubits = k.n_qubits();
    const int items = k.n_items();
    const double lambda = 1.0 + std::accumulate(k.values.begin(), k.values.end(), 0.0);

    auto item_weight = [k, items](std::uint64_t x) {
        long s = 0;
        for (int i = 0; i < items; ++i) {
            if (bit(x, i)) s += k.weights[i];
        }
        return s;
    };
    auto item_value = [k, items](std::uint64_t x) {
        double s = 0.0;
        for (int i = 0; i < items; ++i) {
            if (bit(x, i)) s += k.values[i];
        }
        return s;
    };
    const std::size_t dim = std::size_t{1} << p.n_qubits;
    std::vector<double> c(dim);
    for (std::size_t x = 0; x < dim; ++x) {
        const double slack = static_cast<double>(x >> items);
        const double r = static_cast<double>(item_weight(x)) + slack - k.capacity;
        c[x] = -item_value(x) + lambda * r * r;
    }
    const long cap = k.capacity;
    p.cost = DiagonalCost(p.n_qubits, std::move(c), "knapsack");
    p.feasible = [item_weight, cap](std::uint64_t x) { return item_weight(x) <= cap; };
    p.objective = [item_weight, item_value, cap](std::uint64_t x) {
        return item_weight(x) <= cap ? item_value(x) : 0.0;
    };
    p.instance = to_json(k);
    finish(p);
    return p;
}

BruteForceResult brute_force(const EncodedProblem& p) {
    require_qubits(p.n_qubits, "brute_force");
    const std::uint64_t dim = std::uint64_t{1} << p.n_qubits;
    bool found = false;
    BruteForceResult best{0.0, 0};
    for (std::uint64_t x = 0; x < dim; ++x) {
        if (!p.feasible(x)) continue;
        const double f = p.objective(x);
        if (!found || f > best.opt_value) {
            best = {f, x};
            found = true;
        }
    }
    if (!found) throw ContractViolation("brute_force: no feasible bitstring");
    return best;
}

DecodeMetrics decode_metrics(const std::vector<double>& probs, const EncodedProblem& p) {
    if (probs.size() != p.cost.size()) throw InvalidDimension("decode_metrics: size mismatch");
    double total = 0.0;
    for (double q : probs) total += q;
    if (std::abs(total - 1.0) > 1e-8) throw ContractViolation("decode_metrics: probabilities must sum to 1");
    if (!(p.opt_value > 0.0)) throw ContractViolation("decode_metrics: optimum must be positive");

    DecodeMetrics m;
    std::size_t arg = 0;
    double feasible_mass = 0.0;
    double feasible_value = 0.0;
    for (std::size_t x = 0; x < probs.size(); ++x) {
        if (probs[x] > probs[arg]) arg = x;
        m.energy += probs[x] * p.cost.values[x];
        if (p.feasible(x)) {
            feasible_mass += probs[x];
            feasible_value += probs[x] * p.objective(x);
        }
    }
    m.decoded_bitstring = arg;
    m.decoded_ratio = p.feasible(arg) ? p.objective(arg) / p.opt_value : 0.0;
    m.postselected_ratio = feasible_mass < 1e-12 ? 0.0 : feasible_value / feasible_mass / p.opt_value;
    // guard against rounding just above 1
    m.decoded_ratio = std::clamp(m.decoded_ratio, 0.0, 1.0);
    m.postselected_ratio = std::clamp(m.postselected_ratio, 0.0, 1.0);
    return m;
}

nlohmann::json to_json(const GraphInstance& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : g.edges) edges.push_back({e.u, e.v, e.w});
    nlohmann::json j{{"family", to_string(g.family)}, {"n", g.n_vertices}, {"seed", g.seed}, {"edges", edges}};
    if (!g.vertex_weights.empty()) j["weights"] = g.vertex_weights;
    return j;
}

nlohmann::json to_json(const KnapsackInstance& k) {
    return {{"family", "knapsack"},         {"n", k.n_qubits()},   {"seed", k.seed},
            {"items", k.values},            {"weights", k.weights}, {"capacity", k.capacity},
            {"n_slack_bits", k.n_slack_bits}};
}

GraphInstance graph_from_json(const nlohmann::json& j) {
    GraphInstance g;
    g.family = family_from_string(j.at("family").get<std::string>());
    g.n_vertices = j.at("n").get<int>();
    g.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("edges")) g.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    if (j.contains("weights")) g.vertex_weights = j.at("weights").get<std::vector<double>>();
    g.validate();
    return g;
}

KnapsackInstance knapsack_from_json(const nlohmann::json& j) {
    KnapsackInstance k;
    k.values = j.at("items").get<std::vector<int>>();
    k.weights = j.at("weights").get<std::vector<int>>();
    k.capacity = j.at("capacity").get<int>();
    k.n_slack_bits = j.at("n_slack_bits").get<int>();
    k.seed = j.at("seed").get<std::uint64_t>();
    k.validate();
    return k;
}

}  // namespace mublab
