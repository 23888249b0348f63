#include "mublab/simvec.hpp"

#include <bit>
#include <cmath>

namespace mublab {

namespace {

void check_qubits(int n) {
    if (n < 1 || n > kMaxStateQubits) {
        throw InvalidDimension("StateVector: qubit count must be in [1, " + std::to_string(kMaxStateQubits) + "]");
    }
}

void apply_rx(StateVector& s, int q, double theta) {
    const double c = std::cos(theta / 2.0);
    const cplx mis(0.0, -std::sin(theta / 2.0));
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t x = 0; x < s.size(); ++x) {
        if (x & bit) continue;
        const cplx a0 = s[x];
        const cplx a1 = s[x | bit];
        s[x] = c * a0 + mis * a1;
        s[x | bit] = mis * a0 + c * a1;
    }
}

}  // namespace

StateVector::StateVector(int n_qubits, std::vector<cplx> amplitudes) : n_(n_qubits), amps_(std::move(amplitudes)) {
    check_qubits(n_qubits);
    if (amps_.size() != (std::size_t{1} << n_qubits)) throw InvalidDimension("StateVector: expected 2^n amplitudes");
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

StateVector prepare_basis(int n, std::uint64_t b) {
    check_qubits(n);
    const std::size_t d = std::size_t{1} << n;
    if (b >= d) throw InvalidDimension("prepare_basis: label out of range");
    std::vector<cplx> v(d, cplx(0.0, 0.0));
    v[b] = 1.0;
    return StateVector(n, std::move(v));
}

StateVector prepare_plus(int n) {
    check_qubits(n);
    const std::size_t d = std::size_t{1} << n;
    return StateVector(n, std::vector<cplx>(d, cplx(1.0 / std::sqrt(static_cast<double>(d)), 0.0)));
}

void apply_hadamard_all(StateVector& s) {
    const std::size_t d = s.size();
    for (std::size_t len = 1; len < d; len <<= 1) {
        for (std::size_t i = 0; i < d; i += len << 1) {
            for (std::size_t j = i; j < i + len; ++j) {
                const cplx a = s[j];
                const cplx b = s[j + len];
                s[j] = a + b;
                s[j + len] = a - b;
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (auto& a : s.amplitudes()) a *= scale;
}

void apply_rx_all(StateVector& s, std::span<const double> mus) {
    if (mus.size() != static_cast<std::size_t>(s.n_qubits())) throw InvalidDimension("apply_rx_all: one angle per qubit");
    for (int q = 0; q < s.n_qubits(); ++q) apply_rx(s, q, mus[q]);
}

void apply_family_circuit(StateVector& s, const DiagonalPhaseCircuit& phases) {
    if (phases.n_qubits != s.n_qubits()) throw InvalidDimension("apply_family_circuit: qubit count mismatch");
    apply_hadamard_all(s);
    for (std::size_t x = 0; x < s.size(); ++x) s[x] *= phases.entry(x);
}

void apply_family_circuit(StateVector& s, const FamilyIndex& fi) {
    if (fi.n_qubits != s.n_qubits()) throw InvalidDimension("apply_family_circuit: qubit count mismatch");
    apply_family_circuit(s, phase_circuit(fi.n_qubits, fi.r));
}

void evolve_cost(StateVector& s, const DiagonalCost& cost, double gamma) {
    if (cost.size() != s.size()) throw InvalidDimension("evolve_cost: size mismatch");
    for (std::size_t x = 0; x < s.size(); ++x) s[x] *= std::polar(1.0, -gamma * cost.values[x]);
}

void evolve_xmixer(StateVector& s, double beta) {
    for (int q = 0; q < s.n_qubits(); ++q) apply_rx(s, q, 2.0 * beta);
}

void evolve_zmixer(StateVector& s, double beta) {
    const int n = s.n_qubits();
    for (std::size_t x = 0; x < s.size(); ++x) {
        // sum_i Z_i |x> = (n - 2 popcount(x)) |x>
        const double z = n - 2.0 * std::popcount(x);
        s[x] *= std::polar(1.0, -beta * z);
    }
}

PauliSum::PauliSum(int n_qubits, std::vector<PauliTerm> terms) : n_(n_qubits) {
    for (auto& t : terms) add(t.coeff, std::move(t.word));
}

PauliSum::Masks PauliSum::masks_of(const std::string& word) {
    Masks m{0, 0, 0};
    for (std::size_t q = 0; q < word.size(); ++q) {
        const std::uint64_t bit = std::uint64_t{1} << q;
        switch (word[q]) {
            case 'I': break;
            case 'X': m.flip |= bit; break;
            case 'Z': m.phase |= bit; break;
            case 'Y':
                m.flip |= bit;
                m.phase |= bit;
                ++m.n_y;
                break;
            default: throw Error(std::string("PauliSum: invalid letter '") + word[q] + "'");
        }
    }
    return m;
}

void PauliSum::add(double coeff, std::string word) {
    if (word.size() != static_cast<std::size_t>(n_)) throw InvalidDimension("PauliSum: word length != n_qubits");
    if (!std::isfinite(coeff)) throw ContractViolation("PauliSum: non-finite coefficient");
    masks_.push_back(masks_of(word));
    terms_.push_back({coeff, std::move(word)});
}

std::vector<cplx> PauliSum::apply(std::span<const cplx> psi) const {
    if (psi.size() != (std::size_t{1} << n_)) throw InvalidDimension("PauliSum::apply: size mismatch");
    static const cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    std::vector<cplx> out(psi.size(), cplx(0.0, 0.0));
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        const auto& m = masks_[k];
        const cplx pre = terms_[k].coeff * kIPow[m.n_y & 3];
        // P|x> = i^{#Y} (-1)^{|x & phase|} |x ^ flip>
        for (std::size_t x = 0; x < psi.size(); ++x) {
            const double sign = (std::popcount(x & m.phase) & 1) ? -1.0 : 1.0;
            out[x ^ m.flip] += pre * sign * psi[x];
        }
    }
    return out;
}

CMatrix PauliSum::dense() const {
    const std::size_t d = std::size_t{1} << n_;
    CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    std::vector<cplx> e(d, cplx(0.0, 0.0));
    for (std::size_t c = 0; c < d; ++c) {
        e.assign(d, cplx(0.0, 0.0));
        e[c] = 1.0;
        const auto col = apply(e);
        for (std::size_t r = 0; r < d; ++r) h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
    }
    return h;
}

PauliEvolver::PauliEvolver(const PauliSum& h) : n_(h.n_qubits()) {
    if (n_ > kMaxPauliExpQubits) {
        throw InvalidDimension("PauliEvolver: at most " + std::to_string(kMaxPauliExpQubits) + " qubits supported");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h.dense());
    if (es.info() != Eigen::Success) throw Error("PauliEvolver: eigendecomposition failed");
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
}

void PauliEvolver::evolve(StateVector& s, double t) const {
    if (s.n_qubits() != n_) throw InvalidDimension("PauliEvolver: qubit count mismatch");
    Eigen::Map<CVector> psi(s.amplitudes().data(), static_cast<Eigen::Index>(s.size()));
    CVector coeffs = evecs_.adjoint() * psi;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) coeffs[k] *= std::polar(1.0, -t * evals_[k]);
    psi = evecs_ * coeffs;
}

void evolve_pauli_sum(StateVector& s, const PauliSum& h, double t) {
    if (h.n_qubits() != s.n_qubits()) throw InvalidDimension("evolve_pauli_sum: qubit count mismatch");
    PauliEvolver(h).evolve(s, t);
}

double expectation(const StateVector& s, const PauliSum& h) {
    if (h.n_qubits() != s.n_qubits()) throw InvalidDimension("expectation: qubit count mismatch");
    const auto hpsi = h.apply(s.amplitudes());
    cplx acc(0.0, 0.0);
    for (std::size_t x = 0; x < s.size(); ++x) acc += std::conj(s[x]) * hpsi[x];
    if (std::abs(acc.imag()) > 1e-10 * std::max(1.0, std::abs(acc.real()))) {
        throw ContractViolation("expectation: non-negligible imaginary part");
    }
    return acc.real();
}

double expectation(const StateVector& s, const DiagonalCost& cost) {
    if (cost.size() != s.size()) throw InvalidDimension("expectation: size mismatch");
    double e = 0.0;
    for (std::size_t x = 0; x < s.size(); ++x) e += std::norm(s[x]) * cost.values[x];
    return e;
}

std::vector<double> probabilities(const StateVector& s) {
    std::vector<double> p(s.size());
    for (std::size_t x = 0; x < s.size(); ++x) p[x] = std::norm(s[x]);
    return p;
}

}  // namespace mublab
