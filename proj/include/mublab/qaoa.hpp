// qaoa.hpp
// Standard QAOA and the adaptive MUB-XRot warm start, plus the paired
// win/tie/loss statistics used to compare them.
//
// Angle layout: [gamma_1, beta_1, ..., gamma_p, beta_p]; the warm start
// prepends one mu per qubit. Layers apply exp(-i gamma H_C) and then
// exp(-i beta sum X).

#pragma once

#include "mublab/optimizer.hpp"
#include "mublab/problems.hpp"
#include "mublab/simvec.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace mublab {

inline constexpr double kTieBand = 1e-9;
inline constexpr int kMaxQaoaQubits = 14;

struct QaoaSettings {
    int max_evals = 400;
    double fd_step = 1e-3;
    int restarts = 2;
    double init_angle_max = 0.6;
    double init_mu_max = kPi;
    int screen_top_k = 2;
    int screen_evals = 30;
    int max_rounds = 5;
    double switch_threshold = 1e-4;
    std::uint32_t start_family = 1;
};

struct FamilyStep {
    int round = 0;
    std::uint32_t r = 0;
    double postselected_ratio = 0.0;
    double decoded_ratio = 0.0;
    double energy = 0.0;
    bool accepted = false;
};

struct MethodRecord {
    std::string method;  // "standard" or "adaptive_mub_xrot"
    ProblemFamily family = ProblemFamily::maxcut;
    std::uint64_t instance_seed = 0;
    int n = 0;
    int p = 0;
    std::uint64_t seed = 0;
    DecodeMetrics metrics;
    double runtime_seconds = 0.0;
    std::vector<FamilyStep> family_trace;
    long n_cost_evals = 0;
    long final_family_r = -1;  // -1 for the standard method
    std::vector<double> params;
};

StateVector standard_qaoa_state(const DiagonalCost& cost, std::span<const double> angles);
/// F_r prod_i RX(mu_i) |0>, then the QAOA layers.
StateVector mub_xrot_state(const DiagonalCost& cost, const DiagonalPhaseCircuit& family,
                           std::span<const double> mus, std::span<const double> angles);

MethodRecord run_standard(const EncodedProblem& problem, int p, std::uint64_t seed,
                          const QaoaSettings& settings = {});
MethodRecord run_adaptive_mub_xrot(const EncodedProblem& problem, int p, std::uint64_t seed,
                                   const QaoaSettings& settings = {});

/// Hamming-one neighbours j ^ 2^b restricted to [1, 2^n - 1], ascending.
std::vector<std::uint32_t> family_neighbors(std::uint32_t j, int n);

struct WinTieLoss {
    int wins = 0;
    int ties = 0;
    int losses = 0;
    int total() const { return wins + ties + losses; }
    double non_worse_rate() const;
};

/// |delta| <= kTieBand is a tie.
WinTieLoss classify_deltas(const std::vector<double>& deltas);

struct PairedComparison {
    std::vector<double> deltas;  // adaptive - standard, in case-key order
    WinTieLoss wtl;
    double mean_delta = 0.0;
    double non_worse_rate = 0.0;
    double solved_rate_standard = 0.0;
    double solved_rate_adaptive = 0.0;
    double median_runtime_ratio = 0.0;  // adaptive / standard
    std::size_t n_cases() const { return deltas.size(); }
};

using CaseKey = std::tuple<std::string, std::uint64_t, int, int>;  // family, instance seed, n, p
CaseKey case_key(const MethodRecord& r);

/// Pairs records by (family, instance seed, n, p). Throws listing every
/// unmatched case.
PairedComparison paired_stats(const std::vector<MethodRecord>& standard, const std::vector<MethodRecord>& adaptive);

bool is_solved(double ratio);  // ratio >= 1 - kTieBand
double median(std::vector<double> v);

struct BootstrapCi {
    double mean = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.9;
};

/// Percentile bootstrap of the mean.
BootstrapCi bootstrap_mean_ci(const std::vector<double>& values, double level, int n_resamples, SeededRng& rng);

nlohmann::json to_json(const PairedComparison& c);
nlohmann::json to_json(const MethodRecord& r);

}  // namespace mublab
