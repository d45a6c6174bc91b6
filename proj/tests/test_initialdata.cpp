#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "ncihf/ansatz.hpp"
#include "ncihf/errors.hpp"
#include "ncihf/initialdata.hpp"
#include "ncihf/jacobi.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace ncihf;

namespace {

constexpr cplx I{0.0, 1.0};

JacobiConfig config(int p, int q, double m, long num, long den) {
    JacobiConfig c;
    c.p = p;
    c.q = q;
    c.m = m;
    c.x0_over_K = Rational{num, den};
    return c;
}

// The curve continued to complex x with the oracle's Jacobi functions.
std::array<cplx, 3> curve(cplx x, const JacobiConfig& c) {
    const double x0 = c.resolved_x0();
    const auto a = oracle::sncndn(double(c.p) * x, c.m);
    const auto b = oracle::sncndn(double(c.q) * (x - x0), c.m);
    return {a.sn * b.cn, a.sn * b.sn, a.cn};
}

}  // namespace

TEST(NullSpin, BasicExamples) {
    const CVec3 s = null_spin({1, 0, 0}, {0, 1, 0}, 1.0);
    EXPECT_EQ(s, CVec3(1.0, I, 0.0));
    EXPECT_EQ(dot(s, s), cplx(0));
    EXPECT_EQ(null_spin({-1, 0, 0}, {0, -1, 0}, 2.0), CVec3(-2.0, -2.0 * I, 0.0));
    const double r = 1 / std::sqrt(2.0);
    const CVec3 t = null_spin({r, r, 0}, {0, 0, 1}, cplx(0.3, -1.1));
    EXPECT_LT(std::abs(dot(t, t)), 1e-15);
    EXPECT_NEAR(herm_norm2(t), 2 * std::norm(cplx(0.3, -1.1)), 1e-14);
    EXPECT_THROW(null_spin({1, 0, 0}, {1, 0, 0}, 1.0), ConfigError);
    EXPECT_THROW(null_spin({2, 0, 0}, {0, 1, 0}, 1.0), ConfigError);
}

TEST(TravelingWave, ConstraintsAndBackground) {
    const auto st = fixtures::traveling_wave();
    EXPECT_EQ(st.phi, CVec3(0.0, 0.0, 1.0));
    EXPECT_EQ(st.s[0], st.t[0]);
    EXPECT_LT(std::abs(dot(st.s[0], st.s[0])), 1e-15);
    EXPECT_LT(std::abs(dot(st.s[0], st.phi)), 1e-15);
    EXPECT_LT(std::abs(dot(st.phi, st.phi) - st.rho * st.rho), 1e-15);
    EXPECT_TRUE(constraint_residuals(st).passes(1e-12));
}

TEST(TravelingWave, GeneralDirectionsAndComplexAmplitude) {
    TravelingWaveConfig c;
    const double r = 1 / std::sqrt(2.0);
    c.n1 = {r, 0, r};
    c.n2 = {0, 1, 0};
    c.phi10 = {0.4, 0.2};
    c.s10 = {0.5, 0.5};
    c.rho = 1.3;
    c.a0 = {{0.1, 1.1}, {0.7, 0.9}};
    c.b0 = {{-0.2, -1.0}, {0.5, -0.8}};
    const auto st = traveling_wave_state(c);
    EXPECT_TRUE(constraint_residuals(st).passes(1e-12)) << constraint_residuals(st).max_residual();
    for (cplx v : st.adot) EXPECT_LT(std::abs(v - 1.3), 1e-12);
    for (cplx v : st.bdot) EXPECT_LT(std::abs(v + 1.3), 1e-12);
}

TEST(TravelingWave, RejectsBadConfigs) {
    TravelingWaveConfig c;
    EXPECT_THROW(traveling_wave_state(c), ConfigError);  // no poles
    c.a0 = {{0.0, 1.0}};
    c.b0 = {{0.0, 0.2}};  // b-pole in the wrong strip
    EXPECT_THROW(traveling_wave_state(c), ConfigError);
    c.b0 = {{0.0, -1.0}};
    c.s10 = 0.0;
    EXPECT_THROW(traveling_wave_state(c), ConfigError);
}

TEST(Breather, InitialValues) {
    const auto d = jacobi_data(JacobiConfig::breather());
    const auto& st = d.state;
    const double K = ellip_K(0.5), r2 = std::sqrt(2.0);
    ASSERT_EQ(st.N(), 4u);
    EXPECT_NEAR(st.params.ell(), 2 * K, 1e-14);
    EXPECT_NEAR(st.params.delta(), 2 * K, 1e-14);  // m = 1/2 is the square lattice
    EXPECT_LT(std::abs(st.a[0] - 2.0 * I * K), 1e-13);
    EXPECT_LT(max_abs(st.s[0] - CVec3(r2, 2.0 * I, -r2)), 1e-13);
    EXPECT_LT(max_abs(st.s[2] - CVec3(-2.0, -2.0 * I, 0.0)), 1e-13);
    EXPECT_LT(max_abs(st.s[2] - null_spin({-1, 0, 0}, {0, -1, 0}, 2.0)), 1e-13);
    EXPECT_LT(std::abs(st.phi[0]), 1e-12);
    EXPECT_LT(std::abs(st.phi[2]), 1e-12);
    EXPECT_NEAR(st.phi[1].real(), 1.694, 5e-4);
    EXPECT_NEAR(st.phi[1].real(), 1.6944261695879586, 1e-10);  // frozen
    EXPECT_LT(d.phi_solve_defect, 1e-9);
    EXPECT_TRUE(constraint_residuals(st).passes(1e-10));
    EXPECT_EQ(real_reduction_defect(st), 0.0);
}

TEST(Breather, StripMarginIsTheHalfStrip) {
    // poles sit on Im = delta, in the middle of the admissible strip
    const auto d = jacobi_data(JacobiConfig::breather());
    EXPECT_NEAR(d.strip_margin, d.state.params.delta() / 2, 1e-12);
}

class JacobiFamilies : public ::testing::TestWithParam<std::array<int, 2>> {};

TEST_P(JacobiFamilies, FieldAtTimeZeroIsTheCurve) {
    const auto [p, q] = GetParam();
    const auto cfg = config(p, q, 0.5, 1, 1);
    const auto st = jacobi_state(cfg);
    ASSERT_EQ(st.N(), std::size_t(2 * (p * p + q * q)));
    EXPECT_TRUE(constraint_residuals(st).passes(1e-9)) << constraint_residuals(st).max_residual();
    const auto grid = periodic_grid(st.params.ell(), 256);
    const auto f = eval_field(st, grid);
    double err = 0, norm = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Real3 r = jacobi_curve(grid[i], cfg);
        for (int c = 0; c < 3; ++c) err = std::max(err, std::abs(f.u[i][c] - r[c]));
        norm = std::max(norm, std::abs(f.u2[i] - 1.0));
    }
    EXPECT_LT(err, 1e-9);
    EXPECT_LT(norm, 1e-9);
    const auto u0 = eval_field(st, std::vector<double>{0.0}).u[0];
    EXPECT_LT(max_abs(u0 - CVec3(0.0, 0.0, 1.0)), 1e-10);
}

TEST_P(JacobiFamilies, SpinsAreResiduesOfTheCurve) {
    const auto [p, q] = GetParam();
    const auto cfg = config(p, q, 0.5, 1, 1);
    const auto d = jacobi_data(cfg);
    // i s_j is the residue at alpha_j; small-circle mean, radius well inside the pole spacing
    const double eps = 1e-3;
    constexpr int n = 64;
    for (std::size_t j = 0; j < d.alpha.size(); ++j) {
        std::array<cplx, 3> res{};
        for (int k = 0; k < n; ++k) {
            const cplx e = eps * std::exp(I * (2 * std::numbers::pi * k / n));
            const auto r = curve(d.alpha[j] + e, cfg);
            for (int c = 0; c < 3; ++c) res[c] += r[c] * e / double(n);
        }
        for (int c = 0; c < 3; ++c) {
            const cplx want = I * d.state.s[j][c];
            EXPECT_LT(std::abs(res[c] - want), 1e-8 * std::max(1.0, std::abs(want))) << j << " " << c;
        }
    }
}

TEST_P(JacobiFamilies, IndexMapCoversEveryPoleOnce) {
    const auto [p, q] = GetParam();
    const auto d = jacobi_data(config(p, q, 0.5, 1, 1));
    const std::size_t n1 = std::count(d.pole_set.begin(), d.pole_set.end(), 1);
    const std::size_t n2 = std::count(d.pole_set.begin(), d.pole_set.end(), 2);
    EXPECT_EQ(n1, std::size_t(2 * p * p));
    EXPECT_EQ(n2, std::size_t(2 * q * q));
    std::set<std::pair<double, double>> distinct;
    for (cplx a : d.alpha) distinct.insert({std::round(a.real() * 1e9), std::round(a.imag() * 1e9)});
    EXPECT_EQ(distinct.size(), d.alpha.size());
}

INSTANTIATE_TEST_SUITE_P(PQ, JacobiFamilies,
                         ::testing::Values(std::array{1, 1}, std::array{1, 2}, std::array{2, 1}));

TEST(Jacobi, NonRationalShiftAndOtherModulus) {
    JacobiConfig c;
    c.m = 0.3;
    c.x0 = 0.8 * ellip_K(0.3);
    const auto st = jacobi_state(c);
    EXPECT_TRUE(constraint_residuals(st).passes(1e-9));
    const auto grid = periodic_grid(st.params.ell(), 128);
    const auto f = eval_field(st, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Real3 r = jacobi_curve(grid[i], c);
        for (int k = 0; k < 3; ++k) EXPECT_LT(std::abs(f.u[i][k] - r[k]), 1e-9);
    }
}

TEST(Jacobi, OverlappingPoleSetsAreRejected) {
    // x0 = 2K puts set 2 on top of set 1 for p = q = 1
    EXPECT_THROW(jacobi_state(config(1, 1, 0.5, 2, 1)), ConfigError);
    EXPECT_THROW(jacobi_state(config(1, 1, 0.5, 0, 1)), ConfigError);  // x0 outside (0, 4K)
    EXPECT_THROW(jacobi_state(config(0, 1, 0.5, 1, 1)), ConfigError);
    EXPECT_THROW(jacobi_state(config(1, 1, 1.5, 1, 1)), DomainError);
}

TEST(Jacobi, ResolvedShiftUsesTheCompleteIntegral) {
    EXPECT_NEAR(config(1, 1, 0.5, 1, 2).resolved_x0(), ellip_K(0.5) / 2, 1e-15);
    EXPECT_NEAR(JacobiConfig::breather().resolved_x0(), oracle::K(0.5), 1e-13);
}
