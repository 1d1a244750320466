#pragma once

#include <functional>
#include <vector>

#include "solwave/decomposition.hpp"
#include "solwave/potential.hpp"
#include "solwave/profile.hpp"

namespace solwave {

// Classical modulation coordinates with an unwrapped phase (suitable for
// finite differencing in time).
struct ClassicalState {
    Vec a;
    Vec p;
    double gamma = 0.0;
    double mu = 1.0;

    ClassicalState() : a(Vec::Zero(1)), p(Vec::Zero(1)) {}
    ClassicalState(Vec a_, Vec p_, double gamma_, double mu_)
        : a(std::move(a_)), p(std::move(p_)), gamma(gamma_), mu(mu_) {}

    double h(const Potential& pot) const { return 0.5 * (p.squaredNorm() + pot.evalV(a)); }
};

ClassicalState operator+(const ClassicalState& x, const ClassicalState& y);
ClassicalState operator*(double c, const ClassicalState& x);

struct AlphaCoefficients {
    Vec alphaTrans;     // da/dt - 2p
    Vec alphaBoost;     // -dp/dt - grad V(a)
    double alphaGauge = 0.0;  // mu - p^2 + da/dt.p - V(a) - dgamma/dt
    double alphaScale = 0.0;  // -dmu/dt

    AlphaCoefficients() : alphaTrans(Vec::Zero(1)), alphaBoost(Vec::Zero(1)) {}
    explicit AlphaCoefficients(int d) : alphaTrans(Vec::Zero(d)), alphaBoost(Vec::Zero(d)) {}
    double norm() const;
};

// dp/dt = -grad V(a), da/dt = 2p, dgamma/dt = mu - V(a) + p^2, dmu/dt = 0.
ClassicalState newtonianRHS(const ClassicalState& s, const Potential& pot);

// Same with the force -grad_a V_eff(a, mu).
ClassicalState effectiveRHS(const ClassicalState& s, const SolitonProfile& prof,
                            const Potential& pot);

struct ModulationRHS {
    ClassicalState sigmaDot;
    AlphaCoefficients alpha;
};

// Exact modulation equations with w-coupling: alpha is affine in sigmaDot,
// so the four projected equations close into a (2d+2)x(2d+2) linear system
// solved exactly. Throws SingularSystem above condition 1e12.
ModulationRHS fullModulationRHS(const ModulationState& sigma, const Field& w,
                                const ProfileFamily& family, const Potential& pot,
                                const Nonlinearity& nl);

// alpha from a uniformly sampled series: 4th-order finite differences for
// sigmaDot (one-sided at the ends), then the defining combinations.
std::vector<AlphaCoefficients> alphaFromSeries(const std::vector<double>& times,
                                               const std::vector<ClassicalState>& sigmas,
                                               const Potential& pot);

using ClassicalRHS = std::function<ClassicalState(double, const ClassicalState&)>;

std::vector<std::pair<double, ClassicalState>> rk4Integrate(const ClassicalRHS& rhs,
                                                            const ClassicalState& s0, double T,
                                                            double dt);

// L2 residual of the moving-frame perturbation equation between two
// consecutive decompositions (midpoint evaluation); diagnostic only.
double perturbationResidual(const TrackedPoint& first, const TrackedPoint& second,
                            const ClassicalState& sigmaDot, const ProfileFamily& family,
                            const Potential& pot, const Nonlinearity& nl);

} // namespace solwave
