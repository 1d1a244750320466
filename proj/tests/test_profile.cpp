#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "solwave/profile.hpp"
#include "test_helpers.hpp"

using namespace solwave;
using solwave::testing::supDiff;
using solwave::testing::supNorm;

namespace {

GridSpec grid512() { return GridSpec(1, 512, 40.0); }

// 1D closed form for f = lambda |psi|^s psi:
// eta = ((s+2) mu / (2 lambda))^{1/s} sech^{2/s}(s sqrt(mu) x / 2).
Field powerProfileField(const GridSpec& g, double mu, double lambda, double s) {
    Field eta(g);
    const double C = std::pow((s + 2.0) * mu / (2.0 * lambda), 1.0 / s);
    for (int i = 0; i < g.N; ++i) {
        const double x = g.axisCoord(i);
        eta.v[i] = Complex(C * std::pow(1.0 / std::cosh(0.5 * s * std::sqrt(mu) * x), 2.0 / s), 0.0);
    }
    return eta;
}

} // namespace

TEST_SUITE_BEGIN("profile");

TEST_CASE("closed-form cubic: center value, mass, residual") {
    SolitonProfile prof = closedFormCubic1D(1.0, 1.0, grid512());
    CHECK(prof.eta.v[256].real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(prof.mass == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(prof.massSlope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(prof.residual < 1e-9);

    // quadrature agrees with the analytic mass
    CHECK(0.5 * innerRe(prof.eta, prof.eta) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("ground-state solver matches the cubic closed form") {
    GridSpec g = grid512();
    Nonlinearity nl = Nonlinearity::cubic(1.0);
    for (double mu : {0.5, 1.0, 2.0}) {
        SolitonProfile solved = solveGroundState(nl, mu, g);
        SolitonProfile exact = closedFormCubic1D(mu, 1.0, g);
        CHECK(supDiff(solved.eta, exact.eta) < 1e-8);
        CHECK(solved.residual < 1e-9 * l2Norm(solved.eta));
    }
}

TEST_CASE("ground-state solver: general power oracle (s = 1)") {
    GridSpec g(1, 256, 40.0);
    Nonlinearity nl = Nonlinearity::localPower(1.0, 1.0);
    SolitonProfile solved = solveGroundState(nl, 1.0, g);
    Field exact = powerProfileField(g, 1.0, 1.0, 1.0);
    CHECK(supDiff(solved.eta, exact) < 1e-8);
}

TEST_CASE("ground-state solver: Hartree Gaussian kernel") {
    GridSpec g(1, 256, 30.0);
    Nonlinearity nl = Nonlinearity::hartree(1.0, Nonlinearity::Kernel::Gaussian, 1.0);
    SolitonProfile prof = solveGroundState(nl, 1.0, g);
    CHECK(prof.residual < 1e-10 * l2Norm(prof.eta));
    // even and positive
    for (int i = 1; i < g.N / 2; ++i)
        CHECK(prof.eta.v[i].real() == doctest::Approx(prof.eta.v[g.N - i].real()).epsilon(1e-9));
    for (int i = 0; i < g.N; ++i)
        CHECK(prof.eta.v[i].real() > -1e-12);
    CHECK(prof.eta.v[g.N / 2].real() > 0.5);  // peak at the origin
}

TEST_CASE("cubic scaling symmetry: eta_{4mu} = 2 eta_mu(2x)") {
    // The 4mu solve lives on the half box, so its grid points are exactly
    // the doubled coordinates of the base grid.
    GridSpec g = grid512();
    GridSpec gHalf(1, 512, 20.0);
    Nonlinearity nl = Nonlinearity::cubic(1.0);
    SolitonProfile base = solveGroundState(nl, 1.0, g);
    SolitonProfile scaled = solveGroundState(nl, 4.0, gHalf);
    double err = 0.0;
    for (int i = 0; i < g.N; ++i)
        err = std::max(err, std::abs(scaled.eta.v[i].real() - 2.0 * base.eta.v[i].real()));
    CHECK(err < 1e-8);
}

TEST_CASE("mass curve: cubic analytic values and FD convergence for s = 1") {
    GridSpec g = grid512();
    Nonlinearity cub = Nonlinearity::cubic(1.0);
    MassCurve mc1 = massCurve(cub, 1.0, g);
    CHECK(mc1.mPrime == doctest::Approx(1.0).epsilon(1e-6));
    MassCurve mc4 = massCurve(cub, 4.0, g);
    CHECK(mc4.m / mc1.m == doctest::Approx(2.0).epsilon(1e-9));

    // FD slope converges at second order to the analytic slope
    GridSpec gs(1, 256, 40.0);
    Nonlinearity nl = Nonlinearity::localPower(1.0, 1.0);
    const double analytic = 4.5;  // m = 3 mu^{3/2}, m' = 4.5 sqrt(mu) at mu = 1
    const double e1 = std::abs(massCurve(nl, 1.0, gs, 4e-2).mPrime - analytic);
    const double e2 = std::abs(massCurve(nl, 1.0, gs, 2e-2).mPrime - analytic);
    CHECK(e2 < e1 / 2.5);
    CHECK(e1 / e2 < 6.0);
}

TEST_CASE("tangent basis pairings") {
    SolitonProfile prof = closedFormCubic1D(1.0, 1.0, grid512());
    TangentBasis tb = tangentBasis(prof);

    // omega(i eta, d_mu eta) = m'
    CHECK(symForm(tb.zGauge, tb.zScale) == doctest::Approx(prof.massSlope).epsilon(1e-10));
    // omega(-d_x eta, i x eta) = int x eta eta' = -m
    CHECK(symForm(tb.zTrans[0], tb.zBoost[0]) == doctest::Approx(-prof.mass).epsilon(1e-10));
    // parity orthogonality
    CHECK(std::abs(innerRe(tb.zGauge, tb.zTrans[0])) < 1e-12);
}

TEST_CASE("generalized zero modes of the solved profile") {
    GridSpec g = grid512();
    Nonlinearity nl = Nonlinearity::cubic(1.0);
    SolitonProfile prof = solveGroundState(nl, 1.0, g);

    Field gauge = linearizedApply(nl, prof.eta, prof.mu, Complex(0.0, 1.0) * prof.eta);
    CHECK(l2Norm(gauge) < 1e-8);

    Field dEta = spectralDerive(prof.eta, 0, 1);
    CHECK(l2Norm(linearizedApply(nl, prof.eta, prof.mu, dEta)) < 1e-8);

    Field scale = linearizedApply(nl, prof.eta, prof.mu, prof.dMuEta);
    CHECK(l2Norm(scale + prof.eta) < 1e-6);  // FD-limited

    Field boost = linearizedApply(nl, prof.eta, prof.mu,
                                  Complex(0.0, 1.0) * mulCoord(prof.eta, 0));
    Field target = Complex(0.0, -2.0) * dEta;
    CHECK(l2Norm(boost - target) < 1e-7);
}

TEST_CASE("exponential decay of the profile tail") {
    for (double mu : {0.5, 1.0, 2.0}) {
        SolitonProfile prof = closedFormCubic1D(mu, 1.0, grid512());
        const double C = 2.0 * std::sqrt(2.0 * mu);
        for (int i = 0; i < prof.grid.N; ++i) {
            const double x = prof.grid.axisCoord(i);
            if (std::abs(x) > 5.0 / std::sqrt(mu))
                CHECK(std::abs(prof.eta.v[i].real()) <=
                      C * std::exp(-0.9 * std::sqrt(mu) * std::abs(x)));
        }
    }
}

TEST_CASE("solver output is invariant under grid refinement") {
    Nonlinearity nl = Nonlinearity::cubic(1.0);
    GridSpec coarse(1, 384, 40.0), fine(1, 768, 40.0);
    SolitonProfile pc = solveGroundState(nl, 1.0, coarse);
    SolitonProfile pf = solveGroundState(nl, 1.0, fine);
    double err = 0.0;
    for (int i = 0; i < coarse.N; ++i)
        err = std::max(err, std::abs(pc.eta.v[i].real() - pf.eta.v[2 * i].real()));
    CHECK(err < 1e-9);
}

TEST_CASE("profile family: mass inversion and range errors") {
    GridSpec g = grid512();
    CubicProfileFamily fam(1.0, g);
    CHECK(fam.invertMass(2.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fam.invertMass(2.0 * std::sqrt(1.7)) == doctest::Approx(1.7).epsilon(1e-10));
    CHECK_THROWS_AS(fam.invertMass(0.1), MassOutOfRange);
    CHECK_THROWS_AS(fam.invertMass(100.0), MassOutOfRange);

    SolvedProfileFamily solved(Nonlinearity::cubic(1.0), g);
    SolitonProfile p = solved.at(1.0);
    CHECK(p.mass == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(p.massSlope == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("2d ground state: subcritical power, radial symmetry") {
    GridSpec g(2, 64, 12.0);
    Nonlinearity nl = Nonlinearity::localPower(1.0, 1.0);
    GroundStateOptions opts;
    opts.tol = 1e-9;
    opts.fillDerivatives = false;
    SolitonProfile prof = solveGroundState(nl, 1.0, g, opts);
    CHECK(prof.residual < 1e-8 * l2Norm(prof.eta));
    // even in each axis and symmetric under x <-> y
    auto at = [&](int i, int j) { return prof.eta.v[(std::size_t)i * g.N + j].real(); };
    double asym = 0.0;
    for (int i = 0; i < g.N; ++i) {
        asym = std::max(asym, std::abs(at(32, i) - at(i, 32)));
        if (i > 0) asym = std::max(asym, std::abs(at(32, i) - at(32, g.N - i)));
    }
    CHECK(asym < 1e-10);
    CHECK(at(32, 32) > 1.0);  // peak at the origin
}

TEST_CASE("profile table round trip") {
    GridSpec g(1, 64, 20.0);
    SolitonProfile prof = closedFormCubic1D(1.0, 1.0, g);
    const std::string path = "/tmp/solwave_profile_test.txt";
    writeProfileTable(path, prof);
    Field eta = readProfileTable(path, g);
    CHECK(supDiff(eta, prof.eta) == 0.0);
    std::remove(path.c_str());
}

TEST_SUITE_END();
