// problems.hpp
// Benchmark instances, their diagonal-cost encodings, brute-force optima and
// decoding metrics. Costs follow the "lower is better" convention; objectives
// f(x) >= 0 are maximized.

#pragma once

#include "mublab/diagonal_cost.hpp"
#include "mublab/numcore.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mublab {

inline constexpr int kMaxBruteForceQubits = 20;

enum class ProblemFamily { maxcut, wmaxcut, mis, wmis, knapsack };

std::string to_string(ProblemFamily f);
ProblemFamily family_from_string(const std::string& s);
std::vector<ProblemFamily> all_families();

struct Edge {
    int u;
    int v;
    double w;
};

struct GraphInstance {
    int n_vertices = 0;
    std::vector<Edge> edges;
    std::uint64_t seed = 0;
    ProblemFamily family = ProblemFamily::maxcut;
    std::vector<double> vertex_weights;  // MIS variants; empty means all ones

    void validate() const;
    double vertex_weight(int v) const;
    std::vector<int> degrees() const;
    bool adjacent(int u, int v) const;
    double cut_value(std::uint64_t x) const;
};

struct KnapsackInstance {
    std::vector<int> values;
    std::vector<int> weights;
    int capacity = 0;
    int n_slack_bits = 0;
    std::uint64_t seed = 0;

    int n_items() const { return static_cast<int>(values.size()); }
    int n_qubits() const { return n_items() + n_slack_bits; }
    void validate() const;
};

struct EncodedProblem {
    ProblemFamily family = ProblemFamily::maxcut;
    int n_qubits = 0;
    DiagonalCost cost;
    std::function<bool(std::uint64_t)> feasible;
    std::function<double(std::uint64_t)> objective;
    double opt_value = 0.0;
    std::uint64_t opt_bitstring = 0;
    nlohmann::json instance;  // serialized source instance
};

struct DecodeMetrics {
    double decoded_ratio = 0.0;
    double postselected_ratio = 0.0;
    double energy = 0.0;
    std::uint64_t decoded_bitstring = 0;
};

/// Weight law for the weighted variants: integers uniform in [1, kMaxWeight].
inline constexpr int kMaxWeight = 10;

GraphInstance gen_er_graph(int n, double edge_prob, std::uint64_t seed, bool weighted);
/// Benchmark knapsack on n qubits: max(1, n/3) slack bits, the rest items,
/// capacity 2^slack - 1.
KnapsackInstance gen_knapsack(int n_qubits, std::uint64_t seed);
/// Instance of `family` with n qubits drawn from the seed.
EncodedProblem make_benchmark_problem(ProblemFamily family, int n, std::uint64_t seed);

EncodedProblem encode_maxcut(const GraphInstance& g);
EncodedProblem encode_mis(const GraphInstance& g);
EncodedProblem encode_knapsack(const KnapsackInstance& k);

struct BruteForceResult {
    double opt_value;
    std::uint64_t opt_bitstring;
};

/// Scans all feasible strings; ties go to the lowest index.
BruteForceResult brute_force(const EncodedProblem& p);

DecodeMetrics decode_metrics(const std::vector<double>& probs, const EncodedProblem& p);

nlohmann::json to_json(const GraphInstance& g);
nlohmann::json to_json(const KnapsackInstance& k);
GraphInstance graph_from_json(const nlohmann::json& j);
KnapsackInstance knapsack_from_json(const nlohmann::json& j);

}  // namespace mublab
