#include "mublab/numcore.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mublab {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_(stream_id),
      key_(splitmix64(seed ^ splitmix64(stream_id ^ 0xD1B54A32D192ED03ULL))) {}

SeededRng::result_type SeededRng::operator()() {
    return splitmix64(key_ + (counter_++) * kGolden);
}

double SeededRng::uniform() {
    // 53 high bits -> [0, 1)
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double SeededRng::normal() { return normal_(*this); }

std::uint64_t SeededRng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return (*this)();  // full 64-bit range
    // Rejection sampling keeps the law exactly uniform.
    const std::uint64_t limit = max() - (max() % span);
    std::uint64_t x;
    do {
        x = (*this)();
    } while (x >= limit);
    return lo + x % span;
}

SeededRng SeededRng::split(std::uint64_t child) const {
    return SeededRng(splitmix64(key_ ^ 0x632BE59BD9B4E019ULL), child);
}

void RunningStats::add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double n = static_cast<double>(n_ + o.n_);
    const double delta = o.mean_ - mean_;
    mean_ += delta * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
}

double RunningStats::variance() const {
    return n_ > 1 ? std::max(0.0, m2_ / static_cast<double>(n_ - 1)) : 0.0;
}

double RunningStats::stderr_of_mean() const {
    return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

EstimateWithError RunningStats::estimate() const { return {mean_, stderr_of_mean(), n_}; }

PureState::PureState(CVector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0) throw InvalidDimension("PureState: empty amplitude vector");
    const double n2 = amps_.squaredNorm();
    if (!std::isfinite(n2) || std::abs(n2 - 1.0) > tol::kStateNorm) {
        throw InvalidState("PureState: squared norm " + std::to_string(n2) + " is not 1");
    }
}

PureState PureState::normalized(CVector v) {
    const double n = v.norm();
    if (!(n > 0.0)) throw InvalidState("PureState: cannot normalize the zero vector");
    v /= n;
    return PureState(std::move(v));
}

double hermitian_deviation(const CMatrix& a) {
    if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix& a, double tolerance) {
    return hermitian_deviation(a) <= tolerance;
}

TracelessHermitian::TracelessHermitian(CMatrix m) : m_(std::move(m)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) {
        throw InvalidDimension("TracelessHermitian: matrix must be square and non-empty");
    }
    if (!is_hermitian(m_)) throw ContractViolation("TracelessHermitian: matrix is not Hermitian");
    if (std::abs(m_.trace()) > tol::kExact) {
        throw ContractViolation("TracelessHermitian: trace is not zero");
    }
}

CMatrix sample_gue(int d, SeededRng& rng) {
    if (d < 2) throw InvalidDimension("sample_gue: d must be >= 2");
    const double s = 1.0 / std::sqrt(2.0);
    CMatrix h(d, d);
    for (int j = 0; j < d; ++j) {
        h(j, j) = cplx(rng.normal(), 0.0);
        for (int k = j + 1; k < d; ++k) {
            const double x = rng.normal();
            const double y = rng.normal();
            h(j, k) = cplx(s * x, s * y);
            h(k, j) = std::conj(h(j, k));
        }
    }
    return h;
}

TracelessHermitian project_traceless(const CMatrix& a) {
    if (a.rows() != a.cols()) throw InvalidDimension("project_traceless: matrix is not square");
    if (!is_hermitian(a)) throw ContractViolation("project_traceless: input is not Hermitian");
    const double shift = a.trace().real() / static_cast<double>(a.rows());
    CMatrix out = a;
    out.diagonal().array() -= shift;
    // Exact Hermiticity on the diagonal.
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, i) = cplx(out(i, i).real(), 0.0);
    return TracelessHermitian(std::move(out));
}

TracelessHermitian sample_isotropic_traceless(int d, SeededRng& rng) {
    return project_traceless(sample_gue(d, rng));
}

TracelessHermitian q_operator(const PureState& psi) {
    const auto& v = psi.amplitudes();
    const int d = psi.dim();
    CMatrix q = v * v.adjoint();
    q.diagonal().array() -= 1.0 / d;
    for (int i = 0; i < d; ++i) q(i, i) = cplx(q(i, i).real(), 0.0);
    // Fix the trace residue left by a norm within kStateNorm of 1.
    const double tr = q.trace().real();
    if (std::abs(tr) > tol::kExact) q.diagonal().array() -= tr / d;
    return TracelessHermitian(std::move(q));
}

double hs_inner(const TracelessHermitian& a, const TracelessHermitian& b) {
    if (a.dim() != b.dim()) throw InvalidDimension("hs_inner: dimension mismatch");
    // Tr(AB) = sum_jk A_jk B_kj
    const cplx t = (a.matrix().array() * b.matrix().transpose().array()).sum();
    if (std::abs(t.imag()) > 1e-12 * std::max(1.0, std::abs(t.real()))) {
        throw ContractViolation("hs_inner: non-negligible imaginary part");
    }
    return t.real();
}

CMatrix haar_unitary(int d, SeededRng& rng) {
    if (d < 1) throw InvalidDimension("haar_unitary: d must be >= 1");
    const double s = 1.0 / std::sqrt(2.0);
    CMatrix g(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) g(i, j) = cplx(s * rng.normal(), s * rng.normal());
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    const CMatrix& r = qr.matrixQR();
    for (int j = 0; j < d; ++j) {
        const cplx rjj = r(j, j);
        const double mag = std::abs(rjj);
        const cplx phase = mag > 0.0 ? rjj / mag : cplx(1.0, 0.0);
        q.col(j) *= phase;
    }
    return q;
}

PureState haar_state(int d, SeededRng& rng) {
    CVector v(d);
    for (int i = 0; i < d; ++i) v[i] = cplx(rng.normal(), rng.normal());
    return PureState::normalized(std::move(v));
}

double unitarity_deviation(const CMatrix& u) {
    const CMatrix g = u.adjoint() * u;
    return (g - CMatrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n_tasks, int workers,
                  const std::function<void(std::size_t)>& fn) {
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(resolve_workers(workers)), n_tasks);
    if (k <= 1) {
        for (std::size_t t = 0; t < n_tasks; ++t) fn(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(k);
    for (std::size_t w = 0; w < k; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t t = next.fetch_add(1);
                if (t >= n_tasks) return;
                try {
                    fn(t);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    next.store(n_tasks);
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mublab
