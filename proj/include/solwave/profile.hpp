#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "solwave/grid.hpp"
#include "solwave/nonlinearity.hpp"

namespace solwave {

struct SolitonProfile {
    double mu = 1.0;
    GridSpec grid;
    Field eta;      // real, positive, even
    Field dMuEta;   // d_mu eta
    Field d2MuEta;  // d^2_mu eta (used by the modulation coupling terms)
    double mass = 0.0;       // m(mu) = 1/2 int eta^2
    double massSlope = 0.0;  // m'(mu)
    double residual = 0.0;   // || -Lap eta + mu eta - f(eta) ||_2
};

struct TangentBasis {
    std::vector<Field> zTrans;  // -d_{x_j} eta
    Field zGauge;               // i eta
    std::vector<Field> zBoost;  // i x_j eta
    Field zScale;               // d_mu eta
};

// 1D cubic closed form: eta_mu(x) = sqrt(2 mu / lambda) sech(sqrt(mu) x),
// mass 2 sqrt(mu)/lambda, all mu-derivatives analytic.
SolitonProfile closedFormCubic1D(double mu, double lambda, const GridSpec& g);

struct GroundStateOptions {
    double tol = 1e-10;          // residual target relative to ||eta||
    int maxFlowSteps = 10000;
    int maxNewtonSteps = 50;
    const Field* confine = nullptr;  // optional extra multiplicative term U(x)
    const Field* guess = nullptr;    // warm start
    bool fillDerivatives = true;     // also solve at mu +/- dmu for d_mu eta
};

// Renormalized imaginary-time flow (with a secant loop on the trial mass so
// the multiplier matches mu) followed by a Newton polish at fixed mu.
SolitonProfile solveGroundState(const Nonlinearity& nl, double mu, const GridSpec& g,
                                const GroundStateOptions& opts = {});

struct MassCurve {
    double m = 0.0;
    double mPrime = 0.0;
};
// m by quadrature, m' by centered difference (dmu = 1e-4 mu) or analytically
// for the cubic family. Throws StabilityViolation if m' <= 0.
MassCurve massCurve(const Nonlinearity& nl, double mu, const GridSpec& g, double dmu = 0.0);

TangentBasis tangentBasis(const SolitonProfile& prof);

// Profile provider used by the decomposition and modulation layers.
class ProfileFamily {
  public:
    virtual ~ProfileFamily() = default;
    virtual SolitonProfile at(double mu) const = 0;
    virtual const GridSpec& grid() const = 0;
    virtual const Nonlinearity& nonlinearity() const = 0;
    virtual std::pair<double, double> admissibleRange() const { return {0.5, 2.0}; }

    virtual double massAt(double mu) const { return at(mu).mass; }
    // Monotone inversion of the mass curve over the admissible range.
    double invertMass(double targetMass) const;
};

class CubicProfileFamily : public ProfileFamily {
  public:
    CubicProfileFamily(double lambda, const GridSpec& g,
                       std::pair<double, double> range = {0.5, 2.0});
    SolitonProfile at(double mu) const override;
    const GridSpec& grid() const override { return g_; }
    const Nonlinearity& nonlinearity() const override { return nl_; }
    std::pair<double, double> admissibleRange() const override { return range_; }
    double massAt(double mu) const override { return 2.0 * std::sqrt(mu) / lambda_; }

  private:
    double lambda_;
    GridSpec g_;
    Nonlinearity nl_;
    std::pair<double, double> range_;
};

// Solver-backed family with a cache and warm starts from the nearest solve.
class SolvedProfileFamily : public ProfileFamily {
  public:
    SolvedProfileFamily(const Nonlinearity& nl, const GridSpec& g,
                        std::pair<double, double> range = {0.5, 2.0},
                        double tol = 1e-10);
    SolitonProfile at(double mu) const override;
    const GridSpec& grid() const override { return g_; }
    const Nonlinearity& nonlinearity() const override { return nl_; }
    std::pair<double, double> admissibleRange() const override { return range_; }

  private:
    Nonlinearity nl_;
    GridSpec g_;
    std::pair<double, double> range_;
    double tol_;
    mutable std::mutex mtx_;
    mutable std::map<double, SolitonProfile> cache_;
};

// Local quadratic Taylor model of a profile family around a reference mu,
// built from pre-solved fields. Cheap and smooth in mu; valid while the
// tracked mu stays near mu0 (e.g. families with conserved mu).
class TaylorProfileFamily : public ProfileFamily {
  public:
    TaylorProfileFamily(const Nonlinearity& nl, double mu0, Field eta0, Field dMuEta0,
                        Field d2MuEta0, std::pair<double, double> range);
    SolitonProfile at(double mu) const override;
    const GridSpec& grid() const override { return g_; }
    const Nonlinearity& nonlinearity() const override { return nl_; }
    std::pair<double, double> admissibleRange() const override { return range_; }

  private:
    Nonlinearity nl_;
    GridSpec g_;
    double mu0_;
    Field eta0_, dMuEta0_, d2MuEta0_;
    std::pair<double, double> range_;
};

// Two-column text table (x, eta) for cross-checking.
void writeProfileTable(const std::string& path, const SolitonProfile& prof);
Field readProfileTable(const std::string& path, const GridSpec& g);

} // namespace solwave
