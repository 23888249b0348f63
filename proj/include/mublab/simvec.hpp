// simvec.hpp
// Dense statevector simulator.
//
// Conventions: qubit 0 is the least significant bit of the amplitude index;
// RX(theta) = exp(-i theta X / 2); the transverse mixer is exp(-i beta sum X_i),
// i.e. RX(2 beta) on every qubit.

#pragma once

#include "mublab/diagonal_cost.hpp"
#include "mublab/mub.hpp"
#include "mublab/numcore.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mublab {

inline constexpr int kMaxStateQubits = 20;
inline constexpr int kMaxPauliExpQubits = 10;

class StateVector {
public:
    StateVector() = default;
    StateVector(int n_qubits, std::vector<cplx> amplitudes);

    int n_qubits() const { return n_; }
    std::size_t size() const { return amps_.size(); }
    cplx& operator[](std::size_t i) { return amps_[i]; }
    cplx operator[](std::size_t i) const { return amps_[i]; }
    std::span<cplx> amplitudes() { return amps_; }
    std::span<const cplx> amplitudes() const { return amps_; }
    double norm() const;

private:
    int n_ = 0;
    std::vector<cplx> amps_;
};

StateVector prepare_basis(int n, std::uint64_t b);
StateVector prepare_plus(int n);

/// H on every qubit (fast Walsh-Hadamard transform).
void apply_hadamard_all(StateVector& s);
/// RX(mus[q]) on qubit q.
void apply_rx_all(StateVector& s, std::span<const double> mus);
/// D_r H^{(x)n}.
void apply_family_circuit(StateVector& s, const FamilyIndex& fi);
/// Same with precomputed phases for family r.
void apply_family_circuit(StateVector& s, const DiagonalPhaseCircuit& phases);

/// amplitude x *= exp(-i gamma c(x)).
void evolve_cost(StateVector& s, const DiagonalCost& cost, double gamma);
/// exp(-i beta sum_i X_i).
void evolve_xmixer(StateVector& s, double beta);
/// exp(-i beta sum_i Z_i).
void evolve_zmixer(StateVector& s, double beta);

/// Real-weighted sum of Pauli words; word[q] is the letter on qubit q.
struct PauliTerm {
    double coeff = 0.0;
    std::string word;  // letters I, X, Y, Z; length n_qubits
};

class PauliSum {
public:
    explicit PauliSum(int n_qubits) : n_(n_qubits) {}
    PauliSum(int n_qubits, std::vector<PauliTerm> terms);

    void add(double coeff, std::string word);
    int n_qubits() const { return n_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }

    /// H |psi>.
    std::vector<cplx> apply(std::span<const cplx> psi) const;
    CMatrix dense() const;

private:
    struct Masks {
        std::uint64_t flip;   // X or Y
        std::uint64_t phase;  // Z or Y
        int n_y;
    };
    static Masks masks_of(const std::string& word);

    int n_;
    std::vector<PauliTerm> terms_;
    std::vector<Masks> masks_;
};

/// Caches the eigendecomposition of a PauliSum so exp(-i t H) can be applied
/// for many t. Limited to kMaxPauliExpQubits qubits.
class PauliEvolver {
public:
    explicit PauliEvolver(const PauliSum& h);
    void evolve(StateVector& s, double t) const;
    const Eigen::VectorXd& eigenvalues() const { return evals_; }

private:
    int n_;
    Eigen::VectorXd evals_;
    CMatrix evecs_;
};

/// exp(-i t H)|psi>, exact via dense eigendecomposition; n <= kMaxPauliExpQubits.
void evolve_pauli_sum(StateVector& s, const PauliSum& h, double t);

double expectation(const StateVector& s, const PauliSum& h);
double expectation(const StateVector& s, const DiagonalCost& cost);
std::vector<double> probabilities(const StateVector& s);

}  // namespace mublab
