// numcore.hpp
// Complex linear algebra helpers, random-matrix sampling and the seeded
// randomness contract shared by every other module.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace mublab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
inline constexpr double kPi = 3.14159265358979323846;

// Centralized tolerances. Exact identities are checked at kExact, Monte Carlo
// comparisons at kMcSigmas standard errors.
namespace tol {
inline constexpr double kExact = 1e-10;
inline constexpr double kHermitian = 1e-12;
inline constexpr double kStateNorm = 1e-8;
inline constexpr double kMcSigmas = 5.0;
}  // namespace tol

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidDimension : Error {
    using Error::Error;
};
struct ContractViolation : Error {
    using Error::Error;
};
struct InvalidState : Error {
    using Error::Error;
};

/// Counter-based generator keyed by (seed, stream_id).
///
/// The k-th raw output is a SplitMix64 finalization of key + k * golden, so a
/// stream is a pure function of (seed, stream_id, number of draws). Streams
/// for parallel workers are derived with split(), never shared.
class SeededRng {
public:
    using result_type = std::uint64_t;

    explicit SeededRng(std::uint64_t seed, std::uint64_t stream_id = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()();

    double uniform();                      // [0, 1)
    double uniform(double lo, double hi);  // [lo, hi)
    double normal();
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);  // inclusive

    /// Independent child stream; does not advance this generator.
    SeededRng split(std::uint64_t child) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

struct EstimateWithError {
    double mean = 0.0;
    double std_error = 0.0;  // standard error of the mean
    std::size_t n_samples = 0;
};

/// Welford accumulator; merge() is the parallel reduction step.
class RunningStats {
public:
    void add(double x);
    void merge(const RunningStats& other);
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const;  // unbiased sample variance
    double stderr_of_mean() const;
    EstimateWithError estimate() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Unit-norm amplitude vector.
class PureState {
public:
    /// Throws InvalidState if | ||v||^2 - 1 | > tol::kStateNorm.
    explicit PureState(CVector amplitudes);
    static PureState normalized(CVector v);

    int dim() const { return static_cast<int>(amps_.size()); }
    const CVector& amplitudes() const { return amps_; }
    cplx operator[](Eigen::Index i) const { return amps_[i]; }

private:
    CVector amps_;
};

/// Hermitian matrix with vanishing trace (an element of the traceless
/// Hermitian space with Hilbert-Schmidt inner product).
class TracelessHermitian {
public:
    /// Throws ContractViolation if not Hermitian to tol::kHermitian or if
    /// |Tr| > tol::kExact.
    explicit TracelessHermitian(CMatrix m);

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& matrix() const { return m_; }

private:
    CMatrix m_;
};

double hermitian_deviation(const CMatrix& a);  // max |A - A^dagger|
bool is_hermitian(const CMatrix& a, double tolerance = tol::kHermitian);

/// Diagonal entries iid N(0,1); off-diagonal (x + i y)/sqrt(2). With this
/// normalization Cov(Tr(HA), Tr(HB)) = Tr(AB) for traceless Hermitian A, B.
CMatrix sample_gue(int d, SeededRng& rng);

/// A - (Tr A / d) I.
TracelessHermitian project_traceless(const CMatrix& a);

/// Isotropic Gaussian element of the traceless Hermitian space.
TracelessHermitian sample_isotropic_traceless(int d, SeededRng& rng);

/// Q = |psi><psi| - I/d.
TracelessHermitian q_operator(const PureState& psi);

/// Tr(AB).
double hs_inner(const TracelessHermitian& a, const TracelessHermitian& b);

/// Haar-distributed unitary from QR of a complex Ginibre matrix with the
/// diagonal phase of R divided out.
CMatrix haar_unitary(int d, SeededRng& rng);

/// Haar-random pure state (first column of a Haar unitary).
PureState haar_state(int d, SeededRng& rng);

/// Max entry of |U^dagger U - I|.
double unitarity_deviation(const CMatrix& u);

/// Runs fn(task) for task in [0, n_tasks) over `workers` threads. Tasks are
/// claimed from a shared counter; callers write into per-task slots so the
/// result never depends on the worker count. workers <= 0 means one per
/// hardware thread.
void parallel_for(std::size_t n_tasks, int workers,
                  const std::function<void(std::size_t)>& fn);

int resolve_workers(int workers);

}  // namespace mublab
