#include "mublab/width.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

using namespace mublab;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// E max_k |g_k| for k iid standard normals.
double mean_max_half_normals(int k) {
    return simpson([k](double t) { return 1.0 - std::pow(std::erf(t / std::numbers::sqrt2), k); }, 0.0, 12.0);
}

// E max of m iid standard normals.
double mean_max_normals(int m) {
    const double pos = simpson([m](double t) { return 1.0 - std::pow(phi_cdf(t), m); }, 0.0, 12.0);
    const double neg = simpson([m](double t) { return std::pow(phi_cdf(t), m); }, -12.0, 0.0);
    return pos - neg;
}

// Qubit MUB: Tr(H Q) = g.n / sqrt2 with n = +-e_x, +-e_y, +-e_z.
double qubit_mub_width() { return mean_max_half_normals(3) / std::numbers::sqrt2; }

bool within(const EstimateWithError& e, double target, double sigmas = 5.0) {
    return std::abs(e.mean - target) <= sigmas * e.std_error;
}

}  // namespace

TEST_CASE("oracle values reproduce the frozen constants") {
    CHECK(mean_max_half_normals(3) == doctest::Approx(1.3263867552786095).epsilon(1e-10));
    CHECK(qubit_mub_width() == doctest::Approx(0.9378970691335264).epsilon(1e-10));
    CHECK(std::pow(std::erf(1.0), 3) == doctest::Approx(0.5984394398083478).epsilon(1e-12));
    CHECK(std::sqrt(2.0 / std::numbers::pi) * qubit_mub_width() == doctest::Approx(0.7483335910838984).epsilon(1e-10));
}

TEST_CASE("qubit MUB width matches the half-normal oracle") {
    const auto ens = Ensemble::from_mub(build_prime_mub(2));
    const auto rep = estimate_width(ens, 100000, SeededRng(17, 1));
    CHECK(within(rep.estimate, qubit_mub_width()));
    CHECK(rep.n_samples == 100000);
    const auto lo = estimate_min_expectation(ens, 100000, SeededRng(17, 1));
    CHECK(within(lo.estimate, -qubit_mub_width()));
}

TEST_CASE("a single qubit basis has width 1/sqrt(pi)") {
    std::vector<PureState> zs{PureState(CVector::Unit(2, 0)), PureState(CVector::Unit(2, 1))};
    const auto ens = Ensemble::from_states(2, zs, "z");
    CHECK(within(estimate_width(ens, 100000, SeededRng(3)).estimate, 1.0 / std::sqrt(std::numbers::pi)));
}

TEST_CASE("width is independent of the worker count and reproducible") {
    const auto ens = Ensemble::from_mub(build_prime_mub(3));
    const auto a = estimate_width(ens, 9000, SeededRng(5), 1);
    const auto b = estimate_width(ens, 9000, SeededRng(5), 3);
    const auto c = estimate_width(ens, 9000, SeededRng(6), 1);
    CHECK(a.estimate.mean == b.estimate.mean);
    CHECK(a.estimate.std_error == b.estimate.std_error);
    CHECK(a.estimate.mean != c.estimate.mean);
}

TEST_CASE("max cdf of the qubit MUB at t = 1 is erf(1)^3") {
    const auto ens = Ensemble::from_mub(build_prime_mub(2));
    const auto grid = default_cdf_grid();
    CHECK(grid.size() == 41);
    const auto cdf = max_cdf(ens, grid, 100000, SeededRng(21));
    CHECK(std::abs(cdf.probs[10] - std::pow(std::erf(1.0), 3)) <= 5 * cdf.std_errors[10]);
    CHECK(cdf.probs.front() == 0.0);
    for (std::size_t i = 1; i < cdf.probs.size(); ++i) CHECK(cdf.probs[i] >= cdf.probs[i - 1]);
    CHECK_THROWS(max_cdf(ens, {0.0, 0.0}, 10, SeededRng(1)));
}

TEST_CASE("dominance check on hand-built curves") {
    CdfCurve s{{0.0, 1.0}, {0.5, 0.9}, {0.01, 0.01}, 100};
    CdfCurve m{{0.0, 1.0}, {0.5, 0.99}, {0.01, 0.01}, 100};
    const auto rep = dominance_check(s, m, 5.0);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].t == 1.0);
    CHECK(dominance_check(m, s, 5.0).pass());
    CdfCurve off{{0.0, 2.0}, {0.5, 0.9}, {0.01, 0.01}, 100};
    CHECK_THROWS(dominance_check(off, m));
}

TEST_CASE("random unions do not beat the MUB under common random numbers") {
    for (int d : {2, 3}) {
        SeededRng rng(100 + d);
        const auto mub = Ensemble::from_mub(build_prime_mub(d));
        std::vector<Ensemble> unions;
        for (int k = 0; k < 5; ++k) unions.push_back(Ensemble::from_union(random_basis_union(d, rng), "haar"));
        const auto cmp = compare_widths(mub, unions, 20000, SeededRng(7, d));
        CHECK(cmp.n_violations() == 0);
        for (std::size_t k = 0; k < unions.size(); ++k) {
            const auto solo = estimate_width(unions[k], 20000, SeededRng(7, d));
            CHECK(solo.estimate.mean == doctest::Approx(cmp.others[k].estimate.mean).epsilon(1e-12));
            CHECK(cmp.differences[k].mean ==
                  doctest::Approx(cmp.others[k].estimate.mean - cmp.reference.estimate.mean).epsilon(1e-9));
        }
    }
}

TEST_CASE("comparing an ensemble with itself gives an exactly zero difference") {
    const auto mub = Ensemble::from_mub(build_prime_mub(3));
    const auto cmp = compare_widths(mub, {mub}, 5000, SeededRng(1));
    CHECK(cmp.differences[0].mean == 0.0);
    CHECK_FALSE(cmp.violation[0]);
}

TEST_CASE("simplex frame geometry") {
    for (int d : {2, 3, 4, 7}) {
        const auto f = SimplexFrame::make(d);
        const Eigen::MatrixXd g = f.vertices * f.vertices.transpose();
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) CHECK(std::abs(g(i, j) - ((i == j) - 1.0 / d)) < 1e-12);
        CHECK(f.vertices.colwise().sum().norm() < 1e-12);
    }
    CHECK_THROWS_AS(SimplexFrame::make(1), InvalidDimension);
}

TEST_CASE("complete MUB blocks are simplices and mutually uncorrelated") {
    for (int d : {2, 3, 4}) {
        const auto rep = simplex_blocks(BasisUnion::from_mub(build_complete_mub(d)), 40000, SeededRng(9, d));
        CHECK(rep.n_blocks == d + 1);
        CHECK(rep.within_blocks_ok());
        CHECK(rep.independent_blocks());
        CHECK(rep.max_block_sum < 1e-10);
    }
}

TEST_CASE("a repeated basis is perfectly correlated with itself") {
    const CMatrix id = CMatrix::Identity(2, 2);
    const auto rep = simplex_blocks(BasisUnion(2, {id, id, id}), 5000, SeededRng(2));
    CHECK(rep.cross_block_cov_norms(0, 1) == doctest::Approx(0.5).epsilon(0.05));
    CHECK_FALSE(rep.independent_blocks());
}

TEST_CASE("radial factorization") {
    const auto ens = Ensemble::from_mub(build_prime_mub(2));
    const auto c = radial_width(ens, RadialSpec::constant(2.0), 20000, SeededRng(4));
    CHECK(c.pass);
    CHECK(c.lhs.mean == doctest::Approx(c.rhs.mean).epsilon(1e-12));
    const auto hn = radial_width(ens, RadialSpec::half_normal(), 100000, SeededRng(4));
    CHECK(hn.pass);
    CHECK(within(hn.lhs, std::sqrt(2.0 / std::numbers::pi) * qubit_mub_width()));
    const auto u = radial_width(ens, RadialSpec::uniform01(), 100000, SeededRng(4));
    CHECK(u.pass);
    CHECK(within(u.lhs, 0.5 * qubit_mub_width()));
    CHECK_THROWS(RadialSpec::constant(-1.0));
}

TEST_CASE("octahedron trial on a few ensembles") {
    const auto rep = octahedron_trial(4, 20000, SeededRng(31));
    CHECK(rep.ensemble_widths.size() == 4);
    CHECK(rep.pass());
    CHECK(within(rep.mub_width.estimate, qubit_mub_width()));
}

TEST_CASE("gap probe: block sampler matches the oracles") {
    const auto rep = asymptotic_gap(1, 100000, SeededRng(8));
    CHECK(rep.n_points == 6);
    CHECK(within(rep.m_n_hat, mean_max_normals(6)));
    CHECK(within(rep.w_m_hat, qubit_mub_width()));
    CHECK(rep.gap.mean > 5 * rep.gap.std_error);
    CHECK(rep.reference == doctest::Approx(std::sqrt(std::log(2.0)) / 2));
    CHECK_THROWS_AS(asymptotic_gap(0, 10, SeededRng(1)), InvalidDimension);
    CHECK_THROWS_AS(asymptotic_gap(5, 10, SeededRng(1)), InvalidDimension);
}

TEST_CASE("ensemble validation") {
    CHECK_THROWS(Ensemble::from_states(2, {}, "empty"));
    Ensemble bad;
    bad.d = 2;
    bad.states = {PureState(CVector::Unit(2, 0)), PureState(CVector::Unit(2, 0))};
    bad.basis_label = {0, 0};
    CHECK_THROWS(bad.validate());
}

TEST_CASE("cdf csv output") {
    CdfCurve c{{0.0, 0.5}, {0.25, 0.75}, {0.1, 0.1}, 10};
    std::ostringstream os;
    write_cdf_csv(os, c);
    CHECK(os.str().rfind("t,prob,stderr\n", 0) == 0);
}
