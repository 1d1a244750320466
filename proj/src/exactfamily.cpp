#include "solwave/exactfamily.hpp"

#include <cmath>

namespace solwave {

ConfinedProfile solveConfinedProfile(const Nonlinearity& nl, double mu, const Potential& pot,
                                     const GridSpec& g, double tol) {
    if (pot.family != Potential::Family::Quadratic)
        throw ConfigError("solveConfinedProfile: needs the quadratic family");
    // R_V of a quadratic potential is a-independent: exactly the y.A_eff.y term.
    Field confine = rvField(pot, g, Vec::Zero(g.d));

    GroundStateOptions opts;
    opts.tol = tol;
    opts.confine = &confine;
    opts.fillDerivatives = false;
    SolitonProfile base = solveGroundState(nl, mu, g, opts);

    ConfinedProfile out;
    out.mu = mu;
    out.grid = g;
    out.etaTilde = base.eta;
    out.residual = base.residual;
    return out;
}

std::vector<std::pair<double, ClassicalState>> exactTrajectory(const ClassicalState& s0,
                                                               const Potential& pot, double T,
                                                               double dt) {
    return rk4Integrate(
        [&pot](double, const ClassicalState& s) { return newtonianRHS(s, pot); }, s0, T, dt);
}

PdeComparison compareWithPDE(const ConfinedProfile& prof, const ModulationState& sigma0,
                             double T, const Potential& pot, const Nonlinearity& nl,
                             const PropagatorConfig& cfg, bool keepStates) {
    const GridSpec& g = prof.grid;
    Field psi0 = applySymmetry(sigma0.symmetry(), prof.etaTilde);
    Propagator prop(g, pot, nl, cfg);

    ClassicalState s0(sigma0.a, sigma0.p, sigma0.gamma, sigma0.mu);
    auto classical = exactTrajectory(s0, pot, T, cfg.dt);

    PdeComparison out;
    prop.evolve({0.0, psi0}, T, [&](const EvolutionState& st) {
        const auto idx = static_cast<std::size_t>(std::lround(st.t / cfg.dt));
        const ClassicalState& cs = classical[std::min(idx, classical.size() - 1)].second;
        Field exact = applySymmetry(SymmetryParams(cs.a, cs.p, wrapAngle(cs.gamma)),
                                    prof.etaTilde);
        const double err = l2Norm(st.psi - exact);
        out.errorSeries.emplace_back(st.t, err);
        out.supL2Error = std::max(out.supL2Error, err);
        if (keepStates) {
            out.pdeStates.push_back(st);
            out.classicalStates.push_back(cs);
        }
    });
    return out;
}

} // namespace solwave
