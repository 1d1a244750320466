#include <doctest.h>

#include <cmath>
#include <random>

#include "solwave/potential.hpp"
#include "solwave/profile.hpp"

using namespace solwave;

TEST_SUITE_BEGIN("potential");

namespace {

Vec vec1(double x) {
    Vec v(1);
    v << x;
    return v;
}

Potential randomQuadratic2D(std::mt19937_64& rng, double epsV) {
    std::uniform_real_distribution<double> unif(0.2, 2.0);
    Eigen::MatrixXd M(2, 2);
    M << unif(rng), 0.3 * unif(rng), 0.0, unif(rng);
    M(1, 0) = M(0, 1);
    Eigen::MatrixXd A = M.transpose() * M;  // PSD
    return Potential::quadratic(A, Vec::Zero(2), 0.0, epsV);
}

} // namespace

TEST_CASE("evaluation: zero family, quadratic Hessian, FD gradients") {
    Potential z = Potential::zero(1);
    CHECK(z.evalV(vec1(3.0)) == 0.0);
    CHECK(z.gradV(vec1(3.0))[0] == 0.0);
    CHECK(z.hessV(vec1(3.0))(0, 0) == 0.0);

    Eigen::MatrixXd A(1, 1);
    A << 1.5;
    Potential q = Potential::quadratic(A, Vec::Zero(1), 0.0, 1.0);
    CHECK(q.hessV(vec1(7.0))(0, 0) == doctest::Approx(3.0));

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    Potential quart = Potential::evenQuartic(1, 0.8, 0.5, 0.2);
    for (const Potential& pot : {q, quart}) {
        for (int trial = 0; trial < 20; ++trial) {
            const double x = unif(rng);
            const double dh = 1e-5;
            const double fd = (pot.evalV(vec1(x + dh)) - pot.evalV(vec1(x - dh))) / (2.0 * dh);
            CHECK(std::abs(pot.gradV(vec1(x))[0] - fd) < 1e-8);
            const double fd2 = (pot.gradV(vec1(x + dh))[0] - pot.gradV(vec1(x - dh))[0]) / (2.0 * dh);
            CHECK(std::abs(pot.hessV(vec1(x))(0, 0) - fd2) < 1e-7);
        }
    }
}

TEST_CASE("Taylor remainder R_V: basics and a-independence for quadratic") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> unif(-4.0, 4.0);

    Potential q = Potential::harmonic1D(0.3);
    Potential quart = Potential::evenQuartic(1, 0.6, 0.9, 0.15);
    for (const Potential& pot : {q, quart})
        for (int trial = 0; trial < 10; ++trial)
            CHECK(std::abs(pot.evalRV(vec1(0.0), vec1(unif(rng)))) == 0.0);

    for (int trial = 0; trial < 20; ++trial) {
        const double x = unif(rng);
        const double rv1 = q.evalRV(vec1(x), vec1(unif(rng)));
        const double rv2 = q.evalRV(vec1(x), vec1(unif(rng)));
        CHECK(rv1 == doctest::Approx(rv2).epsilon(1e-12));
        CHECK(rv1 == doctest::Approx(0.09 * x * x).epsilon(1e-10));
    }

    // grad_a R_V against finite differences in a
    for (const Potential& pot : {q, quart}) {
        for (int trial = 0; trial < 20; ++trial) {
            const double x = unif(rng), a = unif(rng);
            const double dh = 1e-5;
            const double fd =
                (pot.evalRV(vec1(x), vec1(a + dh)) - pot.evalRV(vec1(x), vec1(a - dh))) / (2.0 * dh);
            CHECK(std::abs(pot.gradARV(vec1(x), vec1(a))[0] - fd) < 1e-8);
        }
    }
}

TEST_CASE("R_V equals its Hessian-quadrature representation") {
    Potential quart = Potential::evenQuartic(1, 0.6, 0.9, 0.15);
    Potential q = Potential::harmonic1D(0.3);
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> unif(-6.0, 6.0);
    for (const Potential& pot : {q, quart}) {
        for (int trial = 0; trial < 30; ++trial) {
            const Vec x = vec1(unif(rng)), a = vec1(unif(rng));
            CHECK(std::abs(pot.evalRV(x, a) - rvByQuadrature(pot, x, a)) <
                  1e-10 * (1.0 + std::abs(pot.evalRV(x, a))));
        }
    }
}

TEST_CASE("remainder lower bound: constants and margins") {
    CHECK(lowerBoundC0(2.0, 1.0, 1) == doctest::Approx(0.5));
    CHECK(lowerBoundC0(2.0, 1.0, 2) == doctest::Approx(0.5));

    Potential q = Potential::harmonic1D(0.1);
    CHECK(std::abs(lowerBoundMargin(q, vec1(0.0), vec1(3.0), 2.0)) < 1e-14);

    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> xr(-30.0, 30.0);
    std::uniform_real_distribution<double> er(0.02, 0.3);
    const double Ca = 2.0;

    // harmonic, r = 2, both constant branches; 1e4 samples
    for (int trial = 0; trial < 10000; ++trial) {
        const double eps = er(rng);
        Potential pot = Potential::harmonic1D(eps);
        std::uniform_real_distribution<double> ar(-Ca / eps, Ca / eps);
        const Vec x = vec1(xr(rng)), a = vec1(ar(rng));
        CHECK(lowerBoundMargin(pot, x, a, Ca, 1) >= -1e-12);
        CHECK(lowerBoundMargin(pot, x, a, Ca, 2) >= -1e-12);
    }

    // quartic family exercises r = 4 in case (i)
    for (int trial = 0; trial < 10000; ++trial) {
        const double eps = er(rng);
        Potential pot = Potential::evenQuartic(1, 0.7, 0.8, eps);
        std::uniform_real_distribution<double> ar(-Ca / eps, Ca / eps);
        CHECK(lowerBoundMargin(pot, vec1(xr(rng)), vec1(ar(rng)), Ca, 1) >= -1e-12);
    }

    // 2d quadratic: margin vanishes along the soft eigenvector
    std::mt19937_64 rng2(35);
    for (int trial = 0; trial < 2000; ++trial) {
        Potential pot = randomQuadratic2D(rng2, 0.1);
        Vec x(2), a(2);
        std::uniform_real_distribution<double> u2(-10.0, 10.0);
        x << u2(rng2), u2(rng2);
        a << u2(rng2), u2(rng2);
        CHECK(lowerBoundMargin(pot, x, a, 2.0, 1) >= -1e-12);
    }

    CHECK_THROWS_AS(lowerBoundC0(1.5, 1.0, 1), HypothesisViolation);
    CHECK_THROWS_AS(lowerBoundC0(3.0, 1.0, 2), HypothesisViolation);
    CHECK_THROWS_AS(lowerBoundMargin(Potential::zero(1), vec1(1.0), vec1(0.0), 1.0),
                    HypothesisViolation);
}

TEST_CASE("remainder upper bounds: exact gradient vanishing and margins") {
    Potential q = Potential::harmonic1D(0.1);
    const double Ca = 2.0;

    // x = 0: quantities vanish, margins are the (positive) constants
    auto m0 = upperBoundMargins(q, vec1(0.0), vec1(5.0), Ca);
    CHECK(m0.gradA >= 0.0);
    CHECK(m0.rv > 0.0);

    std::mt19937_64 rng(36);
    std::uniform_real_distribution<double> xr(-30.0, 30.0);
    std::uniform_real_distribution<double> er(0.02, 0.3);
    for (int trial = 0; trial < 10000; ++trial) {
        const double eps = er(rng);
        Potential pot = Potential::harmonic1D(eps);
        std::uniform_real_distribution<double> ar(-Ca / eps, Ca / eps);
        const Vec x = vec1(xr(rng)), a = vec1(ar(rng));
        // quadratic family: grad_a R_V = 0 (up to round-off)
        CHECK(pot.gradARV(x, a).norm() < 1e-12);
        auto m = upperBoundMargins(pot, x, a, Ca);
        CHECK(m.gradA >= -1e-12);
        CHECK(m.rv >= -1e-12);
    }
    for (int trial = 0; trial < 10000; ++trial) {
        const double eps = er(rng);
        Potential pot = Potential::evenQuartic(1, 0.7, 0.8, eps);
        std::uniform_real_distribution<double> ar(-Ca / eps, Ca / eps);
        auto m = upperBoundMargins(pot, vec1(xr(rng)), vec1(ar(rng)), Ca);
        CHECK(m.gradA >= -1e-12);
        CHECK(m.rv >= -1e-12);
    }

    CHECK_THROWS_AS(upperBoundMargins(q, vec1(1.0), vec1(100.0), 0.5), HypothesisViolation);
}

TEST_CASE("scalar lemma margins: equality cases and sweeps") {
    // b = 2: the bracketed ratio is identically 1
    for (double y : {-3.0, -0.5, 0.0, 0.7, 2.0, 11.0}) {
        auto m = scalarLemmaMargins(y, 2.0, 2.0);
        CHECK(std::abs(m.maxminLow) < 1e-14);
        CHECK(std::abs(m.maxminHigh) < 1e-14);
        CHECK(std::abs(m.convexity) < 1e-14);  // r = 2: |1+y|^2 - 1 - 2y = y^2
        CHECK(std::abs(m.normEquivLow) < 1e-14);
        CHECK(std::abs(m.normEquivHigh) < 1e-14);
    }
    CHECK(normEquivConstant(2.0) == 0.0);

    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> yr(-15.0, 15.0);
    std::uniform_real_distribution<double> br(0.0, 5.0);
    std::uniform_real_distribution<double> rr(2.0, 4.0);
    for (int trial = 0; trial < 10000; ++trial) {
        auto m = scalarLemmaMargins(yr(rng), br(rng), rr(rng));
        CHECK(m.maxminLow >= -1e-12);
        CHECK(m.maxminHigh >= -1e-12);
        CHECK(m.convexity >= -1e-12);
        CHECK(m.normEquivLow >= -1e-12);
        CHECK(m.normEquivHigh >= -1e-12);
    }
    // norm-equivalence bracket for sub-quadratic growth rates
    std::uniform_real_distribution<double> rlow(1.0, 2.0);
    for (int trial = 0; trial < 10000; ++trial) {
        auto m = scalarLemmaMargins(yr(rng), 2.0, 2.0);
        const double r = rlow(rng);
        const double y = yr(rng);
        const double br2 = 1.0 + y * y;
        const double ratio = (1.0 + y * y * std::pow(br2, (r - 2.0) / 2.0)) / std::pow(br2, r / 2.0);
        const double cr = normEquivConstant(r);
        CHECK(ratio - (1.0 + std::min(0.0, cr)) >= -1e-12);
        CHECK((1.0 + std::max(0.0, cr)) - ratio >= -1e-12);
        (void)m;
    }
    // the bracket is attained: sample near the critical point for r = 4
    {
        const double r = 4.0;
        const double zc = std::sqrt(2.0);             // critical <y>
        const double yc = std::sqrt(zc * zc - 1.0);   // critical y
        auto m = scalarLemmaMargins(yc, 2.0, r);
        CHECK(std::abs(m.normEquivLow) < 1e-12);
    }

    CHECK_THROWS_AS(scalarLemmaMargins(1.0, -1.0, 2.0), HypothesisViolation);
    CHECK_THROWS_AS(scalarLemmaMargins(1.0, 2.0, 1.5), HypothesisViolation);
}

TEST_CASE("assumption inequalities hold with the derived constants") {
    // |d^b V| <= C_V epsV^b <epsV x>^{r-b},  Hess V >= rho1 epsV^2 <epsV x>^{r-2},
    // V >= c_V (epsV|x|)^r for epsV|x| >= c_L
    std::mt19937_64 rng(38);
    std::uniform_real_distribution<double> xr(-50.0, 50.0);
    std::uniform_real_distribution<double> er(0.02, 0.3);
    std::uniform_real_distribution<double> cr(0.3, 1.5);

    for (int trial = 0; trial < 10000; ++trial) {
        const double eps = er(rng);
        Potential pots[2] = {Potential::harmonic1D(eps),
                             Potential::evenQuartic(1, cr(rng), cr(rng), eps)};
        const double x = xr(rng);
        const Vec xv = vec1(x);
        for (const Potential& pot : pots) {
            const double brack = std::sqrt(1.0 + eps * eps * x * x);
            const double r = pot.r;
            CHECK(pot.CV * std::pow(brack, r) - pot.evalV(xv) >= -1e-12);
            CHECK(pot.CV * eps * std::pow(brack, r - 1.0) - std::abs(pot.gradV(xv)[0]) >=
                  -1e-12);
            CHECK(pot.CV * eps * eps * std::pow(brack, r - 2.0) - std::abs(pot.hessV(xv)(0, 0)) >=
                  -1e-12);
            CHECK(pot.hessV(xv)(0, 0) -
                      pot.rho1 * eps * eps * std::pow(brack, r - 2.0) >= -1e-12);
            if (eps * std::abs(x) >= pot.cL)
                CHECK(pot.evalV(xv) - pot.cV * std::pow(eps * std::abs(x), r) >= -1e-12);
        }
        // third derivative of the quartic family: |W'''| = 24 q4 |y| <= C_V <y>
        const Potential& quart = pots[1];
        const double y = eps * x;
        CHECK(quart.CV * eps * eps * eps * std::sqrt(1.0 + y * y) -
                  24.0 * quart.q4 * eps * eps * eps * std::abs(y) >= -1e-12);
    }
}

TEST_CASE("effective potential") {
    GridSpec g(1, 512, 40.0);
    SolitonProfile prof = closedFormCubic1D(1.0, 1.0, g);

    Potential z = Potential::zero(1);
    CHECK(effectivePotential(z, prof.eta, vec1(1.0)) == 0.0);

    Potential q = Potential::harmonic1D(0.1);
    // V_eff(a) = V(a) + epsV^2 <x^2>_eta; gradient equals grad V exactly
    double xsec = 0.0, mass = 0.0;
    for (int i = 0; i < g.N; ++i) {
        const double x = g.axisCoord(i);
        const double d = std::norm(prof.eta.v[i]);
        xsec += x * x * d;
        mass += d;
    }
    xsec /= mass;
    for (double a : {0.0, 0.7, 2.5}) {
        CHECK(effectivePotential(q, prof.eta, vec1(a)) ==
              doctest::Approx(q.evalV(vec1(a)) + 0.01 * xsec).epsilon(1e-12));
        CHECK(gradEffectivePotential(q, prof.eta, vec1(a))[0] ==
              doctest::Approx(q.gradV(vec1(a))[0]).epsilon(1e-12));
    }

    // V_eff approaches V as the profile narrows (mu large)
    Potential quart = Potential::evenQuartic(1, 0.5, 0.5, 0.1);
    SolitonProfile wide = closedFormCubic1D(1.0, 1.0, g);
    SolitonProfile narrow = closedFormCubic1D(4.0, 1.0, g);
    const double a0 = 1.5;
    const double errWide = std::abs(effectivePotential(quart, wide.eta, vec1(a0)) - quart.evalV(vec1(a0)));
    const double errNarrow =
        std::abs(effectivePotential(quart, narrow.eta, vec1(a0)) - quart.evalV(vec1(a0)));
    CHECK(errNarrow < errWide);
}

TEST_SUITE_END();
