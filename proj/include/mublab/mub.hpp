// mub.hpp
// Complete mutually unbiased bases in prime and 2^n dimensions, the qubit
// family circuits C_r = D_r H^{(x)n}, and verification of unbiasedness and of
// the diagonal-cost collapse identity.

#pragma once

#include "mublab/diagonal_cost.hpp"
#include "mublab/numcore.hpp"

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mublab {

struct UnsupportedDimension : Error {
    using Error::Error;
};

enum class ConstructionTag { prime, qubit_register };

std::string to_string(ConstructionTag tag);

/// d+1 orthonormal bases stored as unitaries whose columns are the basis
/// states. Validity is checked by verify_unbiasedness, not by construction.
struct MubSystem {
    int d = 0;
    std::vector<CMatrix> bases;
    ConstructionTag construction_tag = ConstructionTag::prime;
};

/// Family r and computational label b of an n-qubit register,
/// 1 <= n <= kMaxFieldDegree.
struct FamilyIndex {
    int n_qubits;
    std::uint32_t r;
    std::uint32_t b;

    FamilyIndex(int n, std::uint32_t r_, std::uint32_t b_);
};

/// D_r as phase exponents: diagonal entry x is i^{exponent[x]}.
struct DiagonalPhaseCircuit {
    int n_qubits = 0;
    std::vector<std::uint8_t> phase_exponents;  // values in {0,1,2,3}

    cplx entry(std::size_t x) const;
};

/// Labelled list of exactly d+1 orthonormal bases; repeats are allowed.
class BasisUnion {
public:
    BasisUnion(int d, std::vector<CMatrix> bases, std::vector<std::string> labels = {});
    static BasisUnion from_mub(const MubSystem& sys);

    int dim() const { return d_; }
    const std::vector<CMatrix>& bases() const { return bases_; }
    const std::vector<std::string>& labels() const { return labels_; }

private:
    int d_;
    std::vector<CMatrix> bases_;
    std::vector<std::string> labels_;
};

// GF(2^n) arithmetic with fixed irreducible polynomials: x+1 (GF(2)),
// x^2+x+1, x^3+x+1, x^4+x+1 for the densely verified registers, and standard
// low-weight polynomials up to kMaxFieldDegree for larger warm-start circuits.
// Elements are bit masks over the polynomial basis 1, a, a^2, ...
inline constexpr int kMaxFieldDegree = 16;
std::uint32_t field_polynomial(int n);
std::uint32_t gf2n_mul(std::uint32_t a, std::uint32_t b, int n);
int gf2n_trace(std::uint32_t a, int n);
/// Symmetric binary matrix M_r[j][k] = Tr(r a^j a^k).
std::vector<std::vector<int>> trace_form_matrix(std::uint32_t r, int n);

/// Phases x |-> x^T M_r x (mod 4) with x read as an integer 0/1 vector.
DiagonalPhaseCircuit phase_circuit(int n, std::uint32_t r);

CMatrix hadamard_transform(int n);
/// D_r H^{(x)n}: column b is family state (r, b).
CMatrix family_matrix(int n, std::uint32_t r);
PureState family_state(const FamilyIndex& fi);

bool is_prime(int d);

/// d = 2: Z, X, Y eigenbases. Odd prime d: computational basis followed by the
/// bases a = 0..d-1 with components w^{a j^2 + i j}/sqrt(d).
MubSystem build_prime_mub(int d);

/// Computational basis followed by families r = 0..2^n-1 (bases[1 + r]).
MubSystem build_qubit_mub(int n);

/// Prime d via build_prime_mub, d = 2^n (n <= 4) via build_qubit_mub.
MubSystem build_complete_mub(int d);

struct UnbiasednessReport {
    double max_overlap_deviation = 0.0;
    double max_orthonormality_deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

UnbiasednessReport verify_unbiasedness(const MubSystem& sys, double tolerance);

/// |<psi|phi>|^2 over all states of all bases (row/column = basis*d + index).
Eigen::MatrixXd overlap_table(const std::vector<CMatrix>& bases);

/// Union of d+1 independent Haar bases.
BasisUnion random_basis_union(int d, SeededRng& rng);

struct DiagonalCollapseReport {
    int n_qubits = 0;
    std::vector<std::uint32_t> r_list;
    double max_rotation_deviation = 0.0;  // max_r |C_r^+ H C_r - H^n H H^n|_max
    double max_diagonal_deviation = 0.0;  // max_{r,b} |<b|C_r^+ H C_r|b> - Tr(H)/2^n|
    bool pass = false;
};

DiagonalCollapseReport verify_diagonal_collapse(int n, const DiagonalCost& cost,
                                                std::span<const std::uint32_t> r_list);
/// Dense form; throws ContractViolation if `cost` is not diagonal.
DiagonalCollapseReport verify_diagonal_collapse(int n, const CMatrix& cost,
                                                std::span<const std::uint32_t> r_list);

/// { d, construction_tag, bases: [[[re,im],...],...] }. Each basis is a flat
/// list of d*d entries in column-major order, so state i occupies entries
/// [i*d, (i+1)*d).
nlohmann::json to_json(const MubSystem& sys);
MubSystem mub_from_json(const nlohmann::json& j);

}  // namespace mublab
