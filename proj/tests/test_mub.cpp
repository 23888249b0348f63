#include "mublab/mub.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>

using namespace mublab;

namespace {

// Direct scan over all cross-basis pairs; returns max | |<psi|phi>|^2 - 1/d |.
double cross_overlap_deviation(const std::vector<CMatrix>& bases, int d, int* n_pairs = nullptr) {
    double worst = 0.0;
    int count = 0;
    for (std::size_t a = 0; a < bases.size(); ++a) {
        for (std::size_t b = a + 1; b < bases.size(); ++b) {
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    const double ov = std::norm(bases[a].col(i).dot(bases[b].col(j)));
                    worst = std::max(worst, std::abs(ov - 1.0 / d));
                    ++count;
                }
            }
        }
    }
    if (n_pairs) *n_pairs = count;
    return worst;
}

// Remainder of polynomial a modulo b over GF(2); bit k is the x^k coefficient.
std::uint64_t poly_mod(std::uint64_t a, std::uint64_t b) {
    const int db = std::bit_width(b) - 1;
    while (a != 0 && std::bit_width(a) - 1 >= db) a ^= b << (std::bit_width(a) - 1 - db);
    return a;
}

bool irreducible(std::uint64_t p) {
    const int deg = std::bit_width(p) - 1;
    for (std::uint64_t q = 2; std::bit_width(q) - 1 <= deg / 2; ++q) {
        if (poly_mod(p, q) == 0) return false;
    }
    return true;
}

std::uint32_t gf_pow(std::uint32_t a, std::uint64_t e, int n) {
    std::uint32_t r = 1;
    while (e) {
        if (e & 1) r = gf2n_mul(r, a, n);
        a = gf2n_mul(a, a, n);
        e >>= 1;
    }
    return r;
}

}  // namespace

TEST_CASE("prime MUBs are unbiased by direct overlap scan") {
    for (int d : {2, 3, 5, 7, 11}) {
        const auto sys = build_prime_mub(d);
        REQUIRE(sys.bases.size() == static_cast<std::size_t>(d + 1));
        int pairs = 0;
        CHECK(cross_overlap_deviation(sys.bases, d, &pairs) < 1e-9);
        CHECK(pairs == d * (d + 1) / 2 * d * d);
        for (const auto& b : sys.bases) CHECK(unitarity_deviation(b) < 1e-10);
        CHECK(verify_unbiasedness(sys, 1e-9).pass);
    }
}

TEST_CASE("d = 2: three bases, cross overlaps 1/2") {
    const auto sys = build_prime_mub(2);
    CHECK(sys.bases.size() == 3);
    CHECK(cross_overlap_deviation(sys.bases, 2) < 1e-12);
}

TEST_CASE("composite or oversized dimensions are unsupported") {
    CHECK_THROWS_AS(build_prime_mub(6), UnsupportedDimension);
    CHECK_THROWS_AS(build_prime_mub(4), UnsupportedDimension);
    CHECK_THROWS_AS(build_prime_mub(37), UnsupportedDimension);
    CHECK_THROWS_AS(build_complete_mub(6), UnsupportedDimension);
    CHECK_THROWS_AS(build_complete_mub(32), UnsupportedDimension);
    CHECK_THROWS(build_qubit_mub(0));
    CHECK_THROWS(build_qubit_mub(5));
}

TEST_CASE("qubit MUBs n = 1..4 pass at 1e-9") {
    for (int n = 1; n <= 4; ++n) {
        const int d = 1 << n;
        const auto sys = build_qubit_mub(n);
        CHECK(sys.bases.size() == static_cast<std::size_t>(d + 1));
        CHECK(sys.construction_tag == ConstructionTag::qubit_register);
        CHECK(cross_overlap_deviation(sys.bases, d) < 1e-9);
        const auto rep = verify_unbiasedness(sys, 1e-9);
        CHECK(rep.pass);
    }
}

TEST_CASE("n = 2: 20 states, 160 unordered cross-basis pairs at 1/4") {
    int pairs = 0;
    CHECK(cross_overlap_deviation(build_qubit_mub(2).bases, 4, &pairs) < 1e-9);
    CHECK(pairs == 10 * 16);
}

TEST_CASE("n = 1 qubit MUB has the same overlap table as the d = 2 prime MUB") {
    const auto a = overlap_table(build_qubit_mub(1).bases);
    const auto b = overlap_table(build_prime_mub(2).bases);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("field polynomials are irreducible and the field is well formed") {
    for (int n = 1; n <= kMaxFieldDegree; ++n) {
        const auto p = field_polynomial(n);
        CHECK(std::bit_width(p) - 1 == n);
        CHECK(irreducible(p));
    }
    for (int n = 1; n <= 6; ++n) {
        const std::uint32_t q = 1u << n;
        int trace_one = 0;
        for (std::uint32_t a = 0; a < q; ++a) {
            const int t = gf2n_trace(a, n);
            CHECK((t == 0 || t == 1));
            trace_one += t;
            if (a) CHECK(gf_pow(a, q - 1, n) == 1);
            for (std::uint32_t b = 0; b < q; b += 3) {
                CHECK(gf2n_mul(a, b, n) == gf2n_mul(b, a, n));
                CHECK(gf2n_trace(a ^ b, n) == (gf2n_trace(a, n) ^ gf2n_trace(b, n)));
            }
        }
        CHECK(trace_one == static_cast<int>(q / 2));
    }
}

TEST_CASE("family circuits on 5 qubits are still mutually unbiased") {
    const int n = 5, d = 32;
    std::vector<CMatrix> bases{CMatrix::Identity(d, d)};
    for (std::uint32_t r = 0; r < 32; ++r) bases.push_back(family_matrix(n, r));
    CHECK(cross_overlap_deviation(bases, d) < 1e-9);
}

TEST_CASE("phase circuit matches x^T M_r x mod 4 and D_0 is the identity") {
    for (int n = 1; n <= 4; ++n) {
        for (std::uint32_t r = 0; r < (1u << n); ++r) {
            const auto m = trace_form_matrix(r, n);
            const auto pc = phase_circuit(n, r);
            for (std::uint32_t x = 0; x < (1u << n); ++x) {
                int q = 0;
                for (int j = 0; j < n; ++j) {
                    for (int k = 0; k < n; ++k) q += ((x >> j) & 1) * ((x >> k) & 1) * m[j][k];
                    CHECK(m[j][0] == m[0][j]);
                }
                CHECK(pc.phase_exponents[x] == q % 4);
                CHECK(std::abs(std::abs(pc.entry(x)) - 1.0) < 1e-15);
                if (r == 0) CHECK(pc.phase_exponents[x] == 0);
            }
        }
    }
    const auto h = hadamard_transform(2);
    CHECK((family_matrix(2, 0) - h).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("family states") {
    const auto s = family_state(FamilyIndex(1, 0, 0));
    CHECK(std::abs(s[0] - cplx(1 / std::sqrt(2.0), 0)) < 1e-15);
    CHECK(std::abs(s[1] - cplx(1 / std::sqrt(2.0), 0)) < 1e-15);
    const auto sys = build_qubit_mub(2);
    for (std::uint32_t r = 0; r < 4; ++r) {
        for (std::uint32_t b = 0; b < 4; ++b) {
            const auto st = family_state(FamilyIndex(2, r, b));
            for (int x = 0; x < 4; ++x) CHECK(std::abs(std::abs(st[x]) - 0.5) < 1e-15);
            const CVector col = sys.bases[1 + r].col(b);
            CHECK(std::abs(std::norm(col.dot(st.amplitudes())) - 1.0) < 1e-12);
            CHECK((st.amplitudes() - family_state(FamilyIndex(2, r, b)).amplitudes()).norm() == 0.0);
        }
    }
    CHECK_THROWS(FamilyIndex(2, 4, 0));
    CHECK_THROWS(FamilyIndex(2, 0, 4));
}

TEST_CASE("a duplicated computational basis gives overlap deviation 1 - 1/d") {
    auto sys = build_qubit_mub(2);
    sys.bases[2] = sys.bases[0];
    const auto rep = verify_unbiasedness(sys, 1e-9);
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_overlap_deviation == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("tolerance zero fails on rounding residue") {
    CHECK_FALSE(verify_unbiasedness(build_prime_mub(3), 0.0).pass);
}

TEST_CASE("random basis unions") {
    SeededRng a(4), b(4);
    const auto u = random_basis_union(2, a);
    const auto v = random_basis_union(2, b);
    CHECK(u.bases().size() == 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK((u.bases()[k] - v.bases()[k]).norm() == 0.0);
    const CMatrix id = CMatrix::Identity(3, 3);
    CHECK_NOTHROW(BasisUnion(3, {id, id, id, id}));
    CHECK_THROWS(BasisUnion(3, {id, id, id}));
    CHECK_NOTHROW(BasisUnion::from_mub(build_prime_mub(5)));
}

TEST_CASE("diagonal collapse") {
    SUBCASE("antiferromagnetic pair: every diagonal element is Tr/4 = 1") {
        std::vector<std::uint32_t> rs{0, 1, 2, 3};
        const auto rep = verify_diagonal_collapse(2, DiagonalCost(2, {0, 1, 1, 2}), rs);
        CHECK(rep.pass);
        for (auto r : rs) {
            const CMatrix c = family_matrix(2, r);
            CMatrix h = CMatrix::Zero(4, 4);
            h.diagonal() << 0, 1, 1, 2;
            const CMatrix rot = c.adjoint() * h * c;
            for (int b = 0; b < 4; ++b) CHECK(std::abs(rot(b, b) - 1.0) < 1e-12);
        }
    }
    SUBCASE("identity multiple stays the same multiple") {
        std::vector<std::uint32_t> rs{0, 1, 5, 7};
        const auto rep = verify_diagonal_collapse(3, DiagonalCost(3, std::vector<double>(8, 2.5)), rs);
        CHECK(rep.pass);
        for (auto r : rs) {
            const CMatrix c = family_matrix(3, r);
            const CMatrix rot = c.adjoint() * (2.5 * CMatrix::Identity(8, 8)) * c;
            CHECK((rot - 2.5 * CMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("n = 3 random cost: all families give the same rotated matrix") {
        SeededRng rng(12);
        std::vector<double> v(8);
        for (auto& x : v) x = rng.uniform(-2, 2);
        CMatrix h = CMatrix::Zero(8, 8);
        for (int i = 0; i < 8; ++i) h(i, i) = v[i];
        const CMatrix ref = family_matrix(3, 0).adjoint() * h * family_matrix(3, 0);
        for (std::uint32_t r = 1; r < 8; ++r) {
            const CMatrix rot = family_matrix(3, r).adjoint() * h * family_matrix(3, r);
            CHECK((rot - ref).cwiseAbs().maxCoeff() < 1e-12);
        }
        std::vector<std::uint32_t> rs{0, 1, 2, 3, 4, 5, 6, 7};
        CHECK(verify_diagonal_collapse(3, DiagonalCost(3, v), rs).pass);
    }
    SUBCASE("non-diagonal input is a contract error") {
        CMatrix h = CMatrix::Identity(4, 4);
        h(0, 1) = h(1, 0) = 0.1;
        std::vector<std::uint32_t> rs{1};
        CHECK_THROWS_AS(verify_diagonal_collapse(2, h, rs), ContractViolation);
    }
}

TEST_CASE("json round trip preserves the system") {
    const auto sys = build_qubit_mub(2);
    const auto back = mub_from_json(to_json(sys));
    CHECK(back.d == 4);
    CHECK(back.construction_tag == ConstructionTag::qubit_register);
    REQUIRE(back.bases.size() == sys.bases.size());
    for (std::size_t k = 0; k < sys.bases.size(); ++k) CHECK((back.bases[k] - sys.bases[k]).norm() < 1e-15);
    CHECK(verify_unbiasedness(back, 1e-9).pass);
}
