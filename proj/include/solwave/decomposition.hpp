#pragma once

#include <optional>
#include <vector>

#include "solwave/profile.hpp"
#include "solwave/propagator.hpp"

namespace solwave {

struct ModulationState {
    Vec a;
    Vec p;
    double gamma = 0.0;  // wrapped to [0, 2*pi)
    double mu = 1.0;

    ModulationState() : a(Vec::Zero(1)), p(Vec::Zero(1)) {}
    ModulationState(Vec a_, Vec p_, double gamma_, double mu_)
        : a(std::move(a_)), p(std::move(p_)), gamma(wrapAngle(gamma_)), mu(mu_) {}

    SymmetryParams symmetry() const { return SymmetryParams(a, p, gamma); }
};

struct DecomposeOptions {
    double tol = 1e-12;          // on the pairing residuals, relative to ||eta||^2
    int maxIterations = 50;
    double fdStep = 1e-6;        // Jacobian finite-difference step in sigma
    double deltaFraction = 0.2;  // tube radius as a fraction of ||eta||_L2
    double epsV = 1.0;           // weight parameters for the reported w norms
    double r = 2.0;
};

struct DecompositionResult {
    ModulationState sigma;
    Field w;                 // moving-frame perturbation, S^{-1} psi - eta
    Vec orthoResiduals;      // [<Re w, eta>, <Re w, x_j eta>, <Im w, d_j eta>, <Im w, d_mu eta>]
    int newtonIterations = 0;
    FieldNorms wNorms;
};

// Moment-based seed for the Newton solve: centroid, P/N, mass inversion and
// the phase of the overlap with the boosted/translated profile.
ModulationState initialGuess(const Field& psi, const ProfileFamily& family);

// Newton iteration on the 2d+2 symplectic pairing conditions; at the solution
// w = S^{-1} psi - eta_mu satisfies <Re w, eta> = <Re w, x_k eta> =
// <Im w, d_k eta> = <Im w, d_mu eta> = 0.
DecompositionResult decompose(const Field& psi, const ProfileFamily& family,
                              const ModulationState& guess, const DecomposeOptions& opts = {});

// Pairing residuals of a given (sigma, w) without iterating (diagnostics).
Vec pairingResiduals(const Field& w, const SolitonProfile& prof);

// Remove the four pairing components from a field (Gram-Schmidt against the
// skew-orthogonality conditions; the parity-paired directions are L2
// orthogonal, so the projections decouple).
Field projectSkewOrthogonal(const Field& w, const SolitonProfile& prof);

struct TrackedPoint {
    double t = 0.0;
    DecompositionResult dec;
    double gammaUnwrapped = 0.0;
};

// Warm-started decomposition along a trajectory with continuous gamma.
class Tracker {
  public:
    Tracker(const ProfileFamily& family, const DecomposeOptions& opts);
    TrackedPoint feed(const EvolutionState& state);
    bool started() const { return started_; }
    const ModulationState& lastSigma() const { return last_; }

  private:
    const ProfileFamily& family_;
    DecomposeOptions opts_;
    bool started_ = false;
    ModulationState last_;
    double lastUnwrapped_ = 0.0;
};

struct TrackedSeries {
    std::vector<TrackedPoint> points;
    std::optional<std::size_t> truncatedAt;  // index of the first failed state
};

TrackedSeries trackSeries(const std::vector<EvolutionState>& states,
                          const ProfileFamily& family, const DecomposeOptions& opts = {});

} // namespace solwave
