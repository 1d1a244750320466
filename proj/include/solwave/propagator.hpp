#pragma once

#include <functional>

#include "solwave/grid.hpp"
#include "solwave/nonlinearity.hpp"
#include "solwave/potential.hpp"

namespace solwave {

struct PropagatorConfig {
    double dt = 1e-3;
    int outputStride = 10;
    bool dealias = false;
};

struct EvolutionState {
    double t = 0.0;
    Field psi;
};

// Second-order Strang split-step Fourier integrator for
// i dpsi/dt = -Lap psi + V psi - f(psi). The pointwise substep is exact
// because |psi| is invariant under it (the Hartree phase freezes Phi*|psi|^2
// over the substep); only the splitting error remains.
class Propagator {
  public:
    Propagator(const GridSpec& g, const Potential& pot, const Nonlinearity& nl,
               const PropagatorConfig& cfg);

    EvolutionState step(const EvolutionState& state) const { return stepBy(state, cfg_.dt); }
    EvolutionState stepBy(const EvolutionState& state, double dt) const;

    using Observer = std::function<void(const EvolutionState&)>;
    // Advances by round(T/dt) steps; the observer fires on the initial state
    // and then every outputStride steps.
    EvolutionState evolve(const EvolutionState& initial, double T,
                          const Observer& observer = nullptr) const;

    const PropagatorConfig& config() const { return cfg_; }
    const GridSpec& grid() const { return grid_; }

  private:
    GridSpec grid_;
    Potential pot_;
    Nonlinearity nl_;
    PropagatorConfig cfg_;
    Field vField_;
    std::vector<double> kSquared_;
    std::vector<Complex> kinPhase_;  // exp(-i dt k^2) for the configured dt
    Field hartreeKernel_;

    void pointwiseHalfStep(Field& psi, double dt) const;
    void kineticStep(Field& psi, double dt) const;
};

} // namespace solwave
