#pragma once

#include "solwave/modulation.hpp"
#include "solwave/propagator.hpp"

namespace solwave {

// Profile of the confined eigenvalue problem
// 0 = -Lap eta~ + mu eta~ - f(eta~) + (y.A_eff.y) eta~, where the quadratic
// term is the a-independent Taylor remainder of a quadratic potential.
struct ConfinedProfile {
    double mu = 1.0;
    GridSpec grid;
    Field etaTilde;
    double residual = 0.0;
};

ConfinedProfile solveConfinedProfile(const Nonlinearity& nl, double mu, const Potential& pot,
                                     const GridSpec& g, double tol = 1e-10);

// RK4 trajectory of dp/dt = -grad V(a), da/dt = 2p, dgamma/dt = p^2 + mu - V(a).
std::vector<std::pair<double, ClassicalState>> exactTrajectory(const ClassicalState& s0,
                                                               const Potential& pot, double T,
                                                               double dt);

struct PdeComparison {
    double supL2Error = 0.0;
    std::vector<std::pair<double, double>> errorSeries;  // (t, L2 diff)
    std::vector<EvolutionState> pdeStates;               // sampled PDE outputs
    std::vector<ClassicalState> classicalStates;         // matching classical samples
};

// Propagates S_{sigma0} eta~ with the full PDE and compares, at each output
// time, against the transported profile built from the classical trajectory.
PdeComparison compareWithPDE(const ConfinedProfile& prof, const ModulationState& sigma0,
                             double T, const Potential& pot, const Nonlinearity& nl,
                             const PropagatorConfig& cfg, bool keepStates = false);

} // namespace solwave
