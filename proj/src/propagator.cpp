#include "solwave/propagator.hpp"

#include <cmath>

namespace solwave {

Propagator::Propagator(const GridSpec& g, const Potential& pot, const Nonlinearity& nl,
                       const PropagatorConfig& cfg)
    : grid_(g), pot_(pot), nl_(nl), cfg_(cfg) {
    if (cfg.dt <= 0.0) throw ConfigError("propagator: dt must be positive");
    if (cfg.outputStride <= 0) throw ConfigError("propagator: outputStride must be positive");
    nl.validateFor(g.d);

    vField_ = potentialField(pot, g);
    double vMax = 0.0;
    for (const auto& z : vField_.v) vMax = std::max(vMax, std::abs(z.real()));
    if (cfg.dt * vMax >= M_PI)
        throw PhaseWrapGuard("dt * max V >= pi; the pointwise phase would wrap");

    kSquared_.resize(g.size());
    int sub[2];
    for (std::size_t i = 0; i < kSquared_.size(); ++i) {
        g.unflatten(i, sub);
        double k2 = 0.0;
        for (int ax = 0; ax < g.d; ++ax) {
            const double k = g.axisWavenumber(sub[ax]);
            k2 += k * k;
        }
        kSquared_[i] = k2;
    }
    kinPhase_.resize(kSquared_.size());
    for (std::size_t i = 0; i < kSquared_.size(); ++i)
        kinPhase_[i] = std::polar(1.0, -cfg.dt * kSquared_[i]);
    if (nl.kind == Nonlinearity::Kind::Hartree)
        hartreeKernel_ = hartreeKernelField(nl, g);
}

void Propagator::pointwiseHalfStep(Field& psi, double dt) const {
    // psi -> exp(-i (dt/2) (V - g(|psi|^2))) psi with |psi| held fixed.
    const double half = 0.5 * dt;
    if (nl_.kind == Nonlinearity::Kind::Hartree) {
        Field dens(grid_);
        for (std::size_t i = 0; i < psi.size(); ++i)
            dens.v[i] = Complex(std::norm(psi.v[i]), 0.0);
        Field conv = convolve(hartreeKernel_, dens);
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const double g = nl_.lambda * conv.v[i].real();
            psi.v[i] *= std::polar(1.0, -half * (vField_.v[i].real() - g));
        }
        return;
    }
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double m2 = std::norm(psi.v[i]);
        double g = 0.0;
        if (m2 > 0.0) {
            if (nl_.kind == Nonlinearity::Kind::LocalPower)
                g = nl_.lambda * std::pow(m2, nl_.s / 2.0);
            else
                g = nl_.beta * std::pow(m2, nl_.s1 / 2.0) + nl_.lambda * std::pow(m2, nl_.s2 / 2.0);
        }
        psi.v[i] *= std::polar(1.0, -half * (vField_.v[i].real() - g));
    }
}

void Propagator::kineticStep(Field& psi, double dt) const {
    Field hat = fft(psi);
    if (dt == cfg_.dt) {
        for (std::size_t i = 0; i < hat.size(); ++i) hat.v[i] *= kinPhase_[i];
    } else {
        for (std::size_t i = 0; i < hat.size(); ++i)
            hat.v[i] *= std::polar(1.0, -dt * kSquared_[i]);
    }
    if (cfg_.dealias) {
        int sub[2];
        const int cut = grid_.N / 3;
        for (std::size_t i = 0; i < hat.size(); ++i) {
            grid_.unflatten(i, sub);
            for (int ax = 0; ax < grid_.d; ++ax) {
                const int j = sub[ax];
                const int n = (j <= grid_.N / 2) ? j : j - grid_.N;
                if (std::abs(n) > cut) hat.v[i] = Complex(0.0, 0.0);
            }
        }
    }
    psi = ifft(hat);
}

EvolutionState Propagator::stepBy(const EvolutionState& state, double dt) const {
    if (state.psi.grid != grid_) throw GridMismatch("propagator grid mismatch");
    EvolutionState out;
    out.t = state.t + dt;
    out.psi = state.psi;
    pointwiseHalfStep(out.psi, dt);
    kineticStep(out.psi, dt);
    pointwiseHalfStep(out.psi, dt);
    return out;
}

EvolutionState Propagator::evolve(const EvolutionState& initial, double T,
                                  const Observer& observer) const {
    if (T < 0.0) throw ConfigError("evolve: T must be non-negative");
    const long nSteps = std::lround(T / cfg_.dt);
    EvolutionState state = initial;
    if (observer) observer(state);
    for (long k = 1; k <= nSteps; ++k) {
        state = step(state);
        if (k % cfg_.outputStride == 0) {
            if (!state.psi.allFinite())
                throw NonConvergence("evolution produced non-finite values");
            if (observer) observer(state);
        }
    }
    return state;
}

} // namespace solwave
