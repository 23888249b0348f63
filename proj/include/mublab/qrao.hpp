// qrao.hpp
// (3,1)-QRAC relaxation of MaxCut, MUB-family starting states with b0
// prescreening, deterministic Pauli rounding and the family-search strategies.
//
// The relaxed Hamiltonian is maximized. A "family evaluation" is one full
// variational optimization at a fixed family index r; it is a pure function
// of (relaxed problem, p, seed, r), so strategies that visit the same r see
// the same result.

#pragma once

#include "mublab/optimizer.hpp"
#include "mublab/problems.hpp"
#include "mublab/qaoa.hpp"
#include "mublab/simvec.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace mublab {

struct QracEncoding {
    int n_vertices = 0;
    int n_qubits = 0;
    std::vector<int> qubit;  // per vertex
    std::vector<char> axis;  // per vertex: 'X', 'Y' or 'Z'

    void validate(const GraphInstance& g) const;
};

/// Greedy (3,1) packing in degree-descending order (ties: lower vertex).
QracEncoding encode_31(const GraphInstance& g);

struct RelaxedProblem {
    PauliSum h;
    GraphInstance graph;
    QracEncoding encoding;
    double opt = 0.0;  // brute-force max cut
    int n_qubits() const { return encoding.n_qubits; }
};

/// H = sum_{(u,v,w)} w (I - 3 P_u P_v) / 2.
RelaxedProblem relaxed_hamiltonian(const GraphInstance& g, const QracEncoding& enc);

struct Prescreen {
    std::uint32_t b0 = 0;
    double value = 0.0;
};

/// argmax_b <b| C_r^dagger H C_r |b>, ties to the lowest b.
Prescreen prescreen_b0(const RelaxedProblem& relaxed, std::uint32_t r);
/// argmax_b <b| H |b> (no rotation), used by the Z-mixer baseline.
Prescreen prescreen_computational(const RelaxedProblem& relaxed);

enum class Strategy { x_variational, mub_r1_b0, two_pole, bitflip_2pole, exhaustive_oracle, z_variational };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);
std::vector<Strategy> headline_strategies();
bool is_mub_strategy(Strategy s);

struct QraoSettings {
    int max_evals = 400;
    double fd_step = 1e-3;
    int restarts = 2;
    double init_angle_max = 0.6;
    double improve_threshold = 1e-9;
};

struct FamilyResult {
    std::uint32_t r = 0;
    std::uint32_t b0 = 0;
    double energy = 0.0;   // optimized <H_relax>
    double alpha_r = 0.0;  // energy / OPT
    double alpha_c = 0.0;
    std::uint64_t rounded = 0;
    long n_evals = 0;
};

struct SearchTrace {
    std::vector<std::uint32_t> visited;          // in evaluation order
    std::vector<std::uint32_t> pole_starts;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> moves;  // accepted (from, to)
};

struct StrategyRecord {
    Strategy strategy = Strategy::x_variational;
    std::uint64_t graph_seed = 0;
    int n = 0;
    int p = 0;
    double alpha_r = 0.0;
    double alpha_c = 0.0;
    int family_evals = 0;
    long chosen_r = -1;
    long chosen_b0 = -1;
    double runtime_seconds = 0.0;
    SearchTrace trace;
};

/// Memoized family evaluator; each r is optimized at most once.
class FamilyEvaluator {
public:
    FamilyEvaluator(const RelaxedProblem& relaxed, int p, std::uint64_t seed, const QraoSettings& settings);

    const FamilyResult& operator()(std::uint32_t r);
    bool visited(std::uint32_t r) const { return memo_.count(r) > 0; }
    int n_evaluations() const { return static_cast<int>(memo_.size()); }
    const SearchTrace& trace() const { return trace_; }
    SearchTrace& trace() { return trace_; }
    std::uint32_t r_max() const { return r_max_; }

private:
    const RelaxedProblem& relaxed_;
    int p_;
    std::uint64_t seed_;
    QraoSettings settings_;
    PauliEvolver evolver_;
    std::uint32_t r_max_;
    std::map<std::uint32_t, FamilyResult> memo_;
    SearchTrace trace_;
};

/// Steepest-ascent hill climb over r ^ 2^k within [1, r_max]; a move needs
/// an alpha_r gain above `threshold`. Returns the local maximum reached.
std::uint32_t bitflip_local_search(FamilyEvaluator& eval, std::uint32_t start, double threshold);

/// x_v = 0 if <P_v> >= 0 (or |<P_v>| < 1e-12), else 1.
struct Rounding {
    std::uint64_t bitstring = 0;
    double alpha_c = 0.0;
};
Rounding pauli_round(const StateVector& state, const QracEncoding& enc, const GraphInstance& g, double opt);

/// <sigma> on qubit q of a pure state, sigma in {X, Y, Z}.
double single_qubit_expectation(const StateVector& s, int q, char axis);

StrategyRecord run_strategy(const RelaxedProblem& relaxed, Strategy strategy, int p, std::uint64_t seed,
                            const QraoSettings& settings = {});

/// Per-strategy aggregates over paired (graph seed, n, p) cells, with deltas
/// taken against x_variational.
struct StrategySummary {
    std::string strategy;
    std::size_t n_cells = 0;
    double mean_alpha_r = 0.0;
    double mean_alpha_c = 0.0;
    double mean_delta_alpha_r = 0.0;
    WinTieLoss wtl;
    double solved_rate = 0.0;  // alpha_c >= 1 - 1e-9
    double mean_family_evals = 0.0;
};

std::vector<StrategySummary> summarize_strategies(const std::vector<StrategyRecord>& records);

/// All strategies in `strategies` on one graph, sharing the seed.
std::vector<StrategyRecord> strategy_suite(const GraphInstance& g, int p, std::uint64_t seed,
                                           const std::vector<Strategy>& strategies, const QraoSettings& settings = {});

nlohmann::json to_json(const StrategySummary& s);
nlohmann::json to_json(const StrategyRecord& r);

}  // namespace mublab
