// width.hpp
// Monte Carlo estimation of the isotropic random-Hamiltonian Gaussian width
//
//     W(S) = E_H max_{psi in S} Tr(H Q_psi),   Q_psi = |psi><psi| - I/d,
//
// and the empirical checks built on it: paired comparisons of basis unions
// against a complete MUB, stochastic dominance of the maximum, the simplex
// block structure of a basis union, the radial mixture factorization, the
// six-state qubit trial and the asymptotic gap probe.
//
// Sampling is split into fixed-size chunks; chunk k draws its Hamiltonians
// from rng.split(k). Results therefore depend on (seed, stream, n_samples)
// only, never on the worker count, and two calls with the same rng see the
// same Hamiltonians (common random numbers).

#pragma once

#include "mublab/mub.hpp"
#include "mublab/numcore.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mublab {

inline constexpr std::size_t kWidthChunk = 2048;

/// Finite list of pure states, optionally grouped into orthonormal bases.
struct Ensemble {
    int d = 0;
    std::vector<PureState> states;
    std::vector<int> basis_label;  // empty when unlabelled
    std::string descriptor;

    /// Checks unit norms and, if labelled, that every label group holds d
    /// pairwise-orthonormal states.
    void validate() const;
    bool labelled() const { return !basis_label.empty(); }
    std::size_t size() const { return states.size(); }

    static Ensemble from_states(int d, std::vector<PureState> states, std::string descriptor);
    static Ensemble from_union(const BasisUnion& u, std::string descriptor);
    static Ensemble from_mub(const MubSystem& sys);
};

/// Centered regular simplex: rows v_1..v_d of a d x (d-1) matrix V with
/// v_i . v_j = delta_ij - 1/d and sum_i v_i = 0.
struct SimplexFrame {
    int d = 0;
    Eigen::MatrixXd vertices;

    static SimplexFrame make(int d);
    /// h(y) = max_i <v_i, y>.
    double support(const Eigen::VectorXd& y) const;
};

struct CdfCurve {
    std::vector<double> grid;
    std::vector<double> probs;
    std::vector<double> std_errors;
    std::size_t n_samples = 0;
};

struct WidthReport {
    EstimateWithError estimate;
    std::string descriptor;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

WidthReport estimate_width(const Ensemble& ens, std::size_t n_samples, const SeededRng& rng, int workers = 1);
WidthReport estimate_min_expectation(const Ensemble& ens, std::size_t n_samples, const SeededRng& rng,
                                     int workers = 1);

/// Widths of `reference` and each of `others` on one shared Hamiltonian
/// stream, plus the paired difference W(other) - W(reference).
struct PairedWidthComparison {
    WidthReport reference;
    std::vector<WidthReport> others;
    std::vector<EstimateWithError> differences;
    std::vector<bool> violation;  // difference > sigmas * joint stderr
    double sigmas = tol::kMcSigmas;
    std::size_t n_violations() const;
};

PairedWidthComparison compare_widths(const Ensemble& reference, const std::vector<Ensemble>& others,
                                     std::size_t n_samples, const SeededRng& rng, int workers = 1,
                                     double sigmas = tol::kMcSigmas);

/// Default grid [0, 4] in steps of 0.1.
std::vector<double> default_cdf_grid(double t_max = 4.0, double step = 0.1);

CdfCurve max_cdf(const Ensemble& ens, const std::vector<double>& grid, std::size_t n_samples,
                 const SeededRng& rng, int workers = 1);
/// One CDF per ensemble, all on the same Hamiltonian stream.
std::vector<CdfCurve> max_cdfs(const std::vector<Ensemble>& ensembles, const std::vector<double>& grid,
                               std::size_t n_samples, const SeededRng& rng, int workers = 1);

struct DominanceViolation {
    double t;
    double prob_s;
    double prob_m;
    double slack;
};

struct DominanceReport {
    std::vector<DominanceViolation> violations;
    double slack_sigmas = tol::kMcSigmas;
    bool pass() const { return violations.empty(); }
};

/// Flags grid points with P_S(t) < P_M(t) - slack_sigmas * sqrt(se_S^2 + se_M^2).
DominanceReport dominance_check(const CdfCurve& curve_s, const CdfCurve& curve_m,
                                double slack_sigmas = tol::kMcSigmas);

struct SimplexBlocksReport {
    int d = 0;
    int n_blocks = 0;
    Eigen::MatrixXd covariance;         // MC estimate of Cov(X_{a,i}, X_{b,j})
    Eigen::MatrixXd covariance_stderr;  // per entry
    double within_block_cov_error = 0.0;     // max |cov - (delta_ij - 1/d)|
    double within_block_max_sigmas = 0.0;    // same error in stderr units
    Eigen::MatrixXd cross_block_cov_norms;   // per basis pair: max |cov entry|
    Eigen::MatrixXd cross_block_max_sigmas;  // per basis pair: max |cov|/stderr
    Eigen::MatrixXd cross_block_simplex_norms;  // ||V^T K^{ab} V||_F
    double max_block_sum = 0.0;  // max over samples of |sum_i X_{a,i}|
    std::size_t n_samples = 0;
    /// Within-block pattern holds and every cross-block entry is within
    /// `sigmas` stderr of zero.
    bool independent_blocks(double sigmas = tol::kMcSigmas) const;
    bool within_blocks_ok(double sigmas = tol::kMcSigmas) const;
};

SimplexBlocksReport simplex_blocks(const Ensemble& labelled, std::size_t n_samples, const SeededRng& rng,
                                   int workers = 1);
SimplexBlocksReport simplex_blocks(const BasisUnion& u, std::size_t n_samples, const SeededRng& rng,
                                   int workers = 1);

/// Law of the nonnegative radial factor R in H = R G.
struct RadialSpec {
    enum class Kind { constant, half_normal, uniform01 };
    Kind kind = Kind::constant;
    double value = 1.0;  // used by Kind::constant

    static RadialSpec constant(double c);
    static RadialSpec half_normal();
    static RadialSpec uniform01();

    double mean() const;
    double sample(SeededRng& rng) const;
    std::string name() const;
};

struct RadialReport {
    std::string radial;
    EstimateWithError lhs;         // E max Tr(R G Q)
    EstimateWithError rhs;         // E R * E max Tr(G Q)
    EstimateWithError difference;  // paired lhs - rhs
    bool pass = false;
};

RadialReport radial_width(const Ensemble& ens, const RadialSpec& radial, std::size_t n_samples,
                          const SeededRng& rng, int workers = 1);

struct OctahedronReport {
    WidthReport mub_width;
    std::vector<EstimateWithError> ensemble_widths;
    std::vector<EstimateWithError> differences;  // W(random) - W(MUB), paired
    std::size_t n_violations = 0;
    bool pass() const { return n_violations == 0; }
};

/// Random six-state qubit ensembles (Haar states) against the qubit MUB.
OctahedronReport octahedron_trial(std::size_t n_ensembles, std::size_t n_samples, const SeededRng& rng,
                                  int workers = 1);

struct GapReport {
    int n_qubits = 0;
    int d = 0;
    int n_points = 0;  // N = d(d+1)
    EstimateWithError m_n_hat;  // E max of N iid N(0,1)
    EstimateWithError w_m_hat;  // complete-MUB width via the block sampler
    EstimateWithError gap;      // paired m_N - W(M)
    double reference = 0.0;     // sqrt(log d)/d
};

/// Both maxima are computed from one draw of Z_{a,i}: the iid maximum uses Z
/// directly, the MUB width uses the centered blocks Z_{a,i} - mean_i Z_{a,i}.
GapReport asymptotic_gap(int n_qubits, std::size_t n_samples, const SeededRng& rng, int workers = 1);

nlohmann::json to_json(const WidthReport& r);
nlohmann::json to_json(const PairedWidthComparison& r);
nlohmann::json to_json(const DominanceReport& r);
nlohmann::json to_json(const SimplexBlocksReport& r);
nlohmann::json to_json(const RadialReport& r);
nlohmann::json to_json(const OctahedronReport& r);
nlohmann::json to_json(const GapReport& r);
nlohmann::json to_json(const EstimateWithError& e);

/// Columns t,prob,stderr.
void write_cdf_csv(std::ostream& os, const CdfCurve& curve);

}  // namespace mublab
