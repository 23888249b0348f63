#include "mublab/mub.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace mublab {

DiagonalCost::DiagonalCost(int n, std::vector<double> v, std::string meta)
    : n_qubits(n), values(std::move(v)), metadata(std::move(meta)) {
    if (n < 0 || n > 30 || values.size() != (std::size_t{1} << n)) {
        throw InvalidDimension("DiagonalCost: expected 2^n values");
    }
    for (double c : values) {
        if (!std::isfinite(c)) throw ContractViolation("DiagonalCost: non-finite entry");
    }
}

double DiagonalCost::trace() const {
    double t = 0.0;
    for (double c : values) t += c;
    return t;
}

std::string to_string(ConstructionTag tag) {
    return tag == ConstructionTag::prime ? "prime" : "qubit_register";
}

FamilyIndex::FamilyIndex(int n, std::uint32_t r_, std::uint32_t b_) : n_qubits(n), r(r_), b(b_) {
    if (n < 1 || n > kMaxFieldDegree) {
        throw InvalidDimension("FamilyIndex: n_qubits must be in [1, " + std::to_string(kMaxFieldDegree) + "]");
    }
    const std::uint64_t d = std::uint64_t{1} << n;
    if (r >= d || b >= d) throw InvalidDimension("FamilyIndex: r and b must lie in [0, 2^n)");
}

cplx DiagonalPhaseCircuit::entry(std::size_t x) const {
    static const cplx kPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return kPow[phase_exponents.at(x) & 3u];
}

BasisUnion::BasisUnion(int d, std::vector<CMatrix> bases, std::vector<std::string> labels)
    : d_(d), bases_(std::move(bases)), labels_(std::move(labels)) {
    if (d < 2) throw InvalidDimension("BasisUnion: d must be >= 2");
    if (bases_.size() != static_cast<std::size_t>(d + 1)) {
        throw InvalidDimension("BasisUnion: expected exactly d+1 bases");
    }
    for (const auto& u : bases_) {
        if (u.rows() != d || u.cols() != d) throw InvalidDimension("BasisUnion: basis shape mismatch");
        if (unitarity_deviation(u) > tol::kExact) {
            throw ContractViolation("BasisUnion: basis matrix is not unitary");
        }
    }
    if (labels_.empty()) {
        for (int a = 0; a <= d; ++a) labels_.push_back("B" + std::to_string(a));
    } else if (labels_.size() != bases_.size()) {
        throw InvalidDimension("BasisUnion: one label per basis required");
    }
}

BasisUnion BasisUnion::from_mub(const MubSystem& sys) {
    std::vector<std::string> labels;
    for (std::size_t a = 0; a < sys.bases.size(); ++a) labels.push_back("mub" + std::to_string(a));
    return BasisUnion(sys.d, sys.bases, std::move(labels));
}

namespace {

}  // namespace

std::uint32_t field_polynomial(int n) {
    switch (n) {
        case 1: return 0b11;     // x + 1
        case 2: return 0b111;    // x^2 + x + 1
        case 3: return 0b1011;   // x^3 + x + 1
        case 4: return 0b10011;  // x^4 + x + 1
        // Registers beyond the dense-verification range (warm-start circuits).
        case 5: return 0x25;      // x^5 + x^2 + 1
        case 6: return 0x43;      // x^6 + x + 1
        case 7: return 0x83;      // x^7 + x + 1
        case 8: return 0x11D;     // x^8 + x^4 + x^3 + x^2 + 1
        case 9: return 0x211;     // x^9 + x^4 + 1
        case 10: return 0x409;    // x^10 + x^3 + 1
        case 11: return 0x805;    // x^11 + x^2 + 1
        case 12: return 0x1053;   // x^12 + x^6 + x^4 + x + 1
        case 13: return 0x201B;   // x^13 + x^4 + x^3 + x + 1
        case 14: return 0x4443;   // x^14 + x^10 + x^6 + x + 1
        case 15: return 0x8003;   // x^15 + x + 1
        case 16: return 0x1100B;  // x^16 + x^12 + x^3 + x + 1
        default: throw InvalidDimension("GF(2^n): n must be in [1, " + std::to_string(kMaxFieldDegree) + "]");
    }
}

std::uint32_t gf2n_mul(std::uint32_t a, std::uint32_t b, int n) {
    const std::uint32_t poly = field_polynomial(n);
    const std::uint32_t mask = (1u << n) - 1;
    a &= mask;
    b &= mask;
    std::uint32_t r = 0;
    for (int i = 0; i < n; ++i)
        if ((b >> i) & 1u) r ^= a << i;
    for (int i = 2 * n - 2; i >= n; --i)
        if ((r >> i) & 1u) r ^= poly << (i - n);
    return r & mask;
}

int gf2n_trace(std::uint32_t a, int n) {
    // Tr(a) = a + a^2 + a^4 + ... + a^{2^{n-1}}, an element of GF(2).
    std::uint32_t t = 0;
    std::uint32_t x = a;
    for (int i = 0; i < n; ++i) {
        t ^= x;
        x = gf2n_mul(x, x, n);
    }
    if (t > 1u) throw ContractViolation("gf2n_trace: trace left the prime field");
    return static_cast<int>(t);
}

std::vector<std::vector<int>> trace_form_matrix(std::uint32_t r, int n) {
    std::vector<std::vector<int>> m(n, std::vector<int>(n, 0));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) m[j][k] = gf2n_trace(gf2n_mul(r, gf2n_mul(1u << j, 1u << k, n), n), n);
    return m;
}

DiagonalPhaseCircuit phase_circuit(int n, std::uint32_t r) {
    const auto m = trace_form_matrix(r, n);
    const std::size_t d = std::size_t{1} << n;
    DiagonalPhaseCircuit circ;
    circ.n_qubits = n;
    circ.phase_exponents.resize(d);
    for (std::size_t x = 0; x < d; ++x) {
        int q = 0;
        for (int j = 0; j < n; ++j) {
            if (!((x >> j) & 1u)) continue;
            for (int k = 0; k < n; ++k)
                if ((x >> k) & 1u) q += m[j][k];
        }
        circ.phase_exponents[x] = static_cast<std::uint8_t>(q & 3);
    }
    return circ;
}

CMatrix hadamard_transform(int n) {
    const int d = 1 << n;
    const double s = 1.0 / std::sqrt(static_cast<double>(d));
    CMatrix h(d, d);
    for (int x = 0; x < d; ++x)
        for (int b = 0; b < d; ++b)
            h(x, b) = (std::popcount(static_cast<unsigned>(x & b)) & 1) ? -s : s;
    return h;
}

CMatrix family_matrix(int n, std::uint32_t r) {
    FamilyIndex check(n, r, 0);
    const auto circ = phase_circuit(n, r);
    CMatrix u = hadamard_transform(n);
    for (Eigen::Index x = 0; x < u.rows(); ++x) u.row(x) *= circ.entry(static_cast<std::size_t>(x));
    return u;
}

PureState family_state(const FamilyIndex& fi) {
    const std::size_t d = std::size_t{1} << fi.n_qubits;
    const auto circ = phase_circuit(fi.n_qubits, fi.r);
    const double s = 1.0 / std::sqrt(static_cast<double>(d));
    CVector v(static_cast<Eigen::Index>(d));
    for (std::size_t x = 0; x < d; ++x) {
        const double sign = (std::popcount(static_cast<unsigned>(x & fi.b)) & 1) ? -s : s;
        v[static_cast<Eigen::Index>(x)] = sign * circ.entry(x);
    }
    return PureState(std::move(v));
}

bool is_prime(int d) {
    if (d < 2) return false;
    for (int k = 2; k * k <= d; ++k)
        if (d % k == 0) return false;
    return true;
}

MubSystem build_prime_mub(int d) {
    if (!is_prime(d) || d > 31) {
        throw UnsupportedDimension("build_prime_mub: d = " + std::to_string(d) +
                                   " is not a supported prime (2..31)");
    }
    MubSystem sys;
    sys.d = d;
    sys.construction_tag = ConstructionTag::prime;
    sys.bases.push_back(CMatrix::Identity(d, d));
    const double s = 1.0 / std::sqrt(static_cast<double>(d));
    if (d == 2) {
        CMatrix x(2, 2), y(2, 2);
        x << s, s, s, -s;
        y << cplx(s, 0), cplx(s, 0), cplx(0, s), cplx(0, -s);
        sys.bases.push_back(x);
        sys.bases.push_back(y);
        return sys;
    }
    const double w = 2.0 * std::numbers::pi / d;
    for (int a = 0; a < d; ++a) {
        CMatrix u(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const long e = (static_cast<long>(a) * j * j + static_cast<long>(i) * j) % d;
                u(j, i) = std::polar(s, w * static_cast<double>(e));
            }
        sys.bases.push_back(std::move(u));
    }
    return sys;
}

MubSystem build_qubit_mub(int n) {
    if (n < 1 || n > 4) throw InvalidDimension("build_qubit_mub: n must be in [1, 4]");
    const int d = 1 << n;
    MubSystem sys;
    sys.d = d;
    sys.construction_tag = ConstructionTag::qubit_register;
    sys.bases.push_back(CMatrix::Identity(d, d));
    for (std::uint32_t r = 0; r < static_cast<std::uint32_t>(d); ++r) sys.bases.push_back(family_matrix(n, r));
    return sys;
}

MubSystem build_complete_mub(int d) {
    if (is_prime(d)) return build_prime_mub(d);
    for (int n = 2; n <= 4; ++n)
        if (d == (1 << n)) return build_qubit_mub(n);
    throw UnsupportedDimension("no complete MUB construction for d = " + std::to_string(d));
}

Eigen::MatrixXd overlap_table(const std::vector<CMatrix>& bases) {
    if (bases.empty()) return {};
    const Eigen::Index d = bases.front().rows();
    CMatrix all(d, d * static_cast<Eigen::Index>(bases.size()));
    for (std::size_t a = 0; a < bases.size(); ++a) all.middleCols(static_cast<Eigen::Index>(a) * d, d) = bases[a];
    return (all.adjoint() * all).cwiseAbs2();
}

UnbiasednessReport verify_unbiasedness(const MubSystem& sys, double tolerance) {
    UnbiasednessReport rep;
    rep.tolerance = tolerance;
    const double inv_d = 1.0 / sys.d;
    for (const auto& u : sys.bases) {
        rep.max_orthonormality_deviation = std::max(rep.max_orthonormality_deviation, unitarity_deviation(u));
    }
    for (std::size_t a = 0; a < sys.bases.size(); ++a) {
        for (std::size_t b = a + 1; b < sys.bases.size(); ++b) {
            const Eigen::MatrixXd ov = (sys.bases[a].adjoint() * sys.bases[b]).cwiseAbs2();
            rep.max_overlap_deviation = std::max(rep.max_overlap_deviation, (ov.array() - inv_d).abs().maxCoeff());
        }
    }
    rep.pass = sys.bases.size() == static_cast<std::size_t>(sys.d + 1) &&
               rep.max_overlap_deviation <= tolerance && rep.max_orthonormality_deviation <= tolerance;
    return rep;
}

BasisUnion random_basis_union(int d, SeededRng& rng) {
    if (d < 2) throw InvalidDimension("random_basis_union: d must be >= 2");
    std::vector<CMatrix> bases;
    for (int a = 0; a <= d; ++a) bases.push_back(haar_unitary(d, rng));
    return BasisUnion(d, std::move(bases));
}

DiagonalCollapseReport verify_diagonal_collapse(int n, const CMatrix& cost, std::span<const std::uint32_t> r_list) {
    if (n < 1 || n > 4) throw InvalidDimension("verify_diagonal_collapse: n must be in [1, 4]");
    const int d = 1 << n;
    if (cost.rows() != d || cost.cols() != d) throw InvalidDimension("verify_diagonal_collapse: cost shape");
    CMatrix off = cost;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() > 0.0) {
        throw ContractViolation("verify_diagonal_collapse: cost is not diagonal in the computational basis");
    }
    DiagonalCollapseReport rep;
    rep.n_qubits = n;
    rep.r_list.assign(r_list.begin(), r_list.end());
    const CMatrix h = hadamard_transform(n);
    const CMatrix reference = h * cost * h;
    const cplx mean_diag = cost.trace() / static_cast<double>(d);
    for (std::uint32_t r : r_list) {
        const CMatrix c = family_matrix(n, r);
        const CMatrix rotated = c.adjoint() * cost * c;
        rep.max_rotation_deviation = std::max(rep.max_rotation_deviation, (rotated - reference).cwiseAbs().maxCoeff());
        for (int b = 0; b < d; ++b) {
            rep.max_diagonal_deviation = std::max(rep.max_diagonal_deviation, std::abs(rotated(b, b) - mean_diag));
        }
    }
    rep.pass = rep.max_rotation_deviation <= tol::kExact && rep.max_diagonal_deviation <= tol::kExact;
    return rep;
}

DiagonalCollapseReport verify_diagonal_collapse(int n, const DiagonalCost& cost,
                                                std::span<const std::uint32_t> r_list) {
    if (cost.n_qubits != n) throw InvalidDimension("verify_diagonal_collapse: qubit count mismatch");
    CMatrix dense = CMatrix::Zero(1 << n, 1 << n);
    for (std::size_t x = 0; x < cost.size(); ++x) dense(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = cost.values[x];
    return verify_diagonal_collapse(n, dense, r_list);
}

nlohmann::json to_json(const MubSystem& sys) {
    nlohmann::json bases = nlohmann::json::array();
    for (const auto& u : sys.bases) {
        nlohmann::json entries = nlohmann::json::array();
        for (Eigen::Index c = 0; c < u.cols(); ++c)
            for (Eigen::Index r = 0; r < u.rows(); ++r) entries.push_back({u(r, c).real(), u(r, c).imag()});
        bases.push_back(std::move(entries));
    }
    return {{"d", sys.d}, {"construction_tag", to_string(sys.construction_tag)}, {"bases", std::move(bases)}};
}

MubSystem mub_from_json(const nlohmann::json& j) {
    MubSystem sys;
    sys.d = j.at("d").get<int>();
    const auto tag = j.at("construction_tag").get<std::string>();
    if (tag == "prime") {
        sys.construction_tag = ConstructionTag::prime;
    } else if (tag == "qubit_register") {
        sys.construction_tag = ConstructionTag::qubit_register;
    } else {
        throw Error("mub_from_json: unknown construction_tag '" + tag + "'");
    }
    for (const auto& basis : j.at("bases")) {
        if (basis.size() != static_cast<std::size_t>(sys.d * sys.d)) throw InvalidDimension("mub_from_json: basis size");
        CMatrix u(sys.d, sys.d);
        std::size_t k = 0;
        for (int c = 0; c < sys.d; ++c)
            for (int r = 0; r < sys.d; ++r, ++k) u(r, c) = cplx(basis[k].at(0).get<double>(), basis[k].at(1).get<double>());
        sys.bases.push_back(std::move(u));
    }
    return sys;
}

}  // namespace mublab
