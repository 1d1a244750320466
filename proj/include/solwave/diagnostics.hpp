#pragma once

#include "solwave/decomposition.hpp"
#include "solwave/modulation.hpp"
#include "solwave/nonlinearity.hpp"
#include "solwave/potential.hpp"
#include "solwave/profile.hpp"

namespace solwave {

// H_V = 1/2 int (|grad psi|^2 + V |psi|^2) - F(psi).
double hamiltonian(const Field& psi, const Potential& pot, const Nonlinearity& nl);

struct MassMomentum {
    double mass = 0.0;
    Vec momentum;
};
// N = 1/2 int |psi|^2, P = 1/2 Im int conj(psi) grad psi.
MassMomentum massAndMomentum(const Field& psi);

// E_mu(u) = H_{V=0}(u) + mu N(u).
double energyEmu(const Field& u, double mu, const Nonlinearity& nl);

// K_sigma = H_V + (p^2 + mu) N - 2 p.P - 1/2 int (V(a) + grad V(a).(x-a)) |psi|^2.
double kSigma(const Field& psi, const ModulationState& sigma, const Potential& pot,
              const Nonlinearity& nl);

// Lambda = E_mu(eta+w) + 1/2 <R_V(eta+w), eta+w> - E_mu(eta) - 1/2 <R_V eta, eta>.
double lyapunov(const SolitonProfile& prof, const Field& w, const Vec& a,
                const Potential& pot, const Nonlinearity& nl);

// Moving-frame time derivative of Lambda:
//   dL/dt = p.<(grad_a R_V) w, w> - 1/2 alpha_t . Hess V(a) . <x w, w> + R,
//   R = alpha_b.<i w, grad w> + 2 p.<(grad_a R_V) eta, w>
//       - 1/2 alpha_t.<(grad_a R_V) eta, eta> + (mu_dot/2)||w||^2
//       - mu_dot <R_V eta, d_mu eta>.
double lyapunovRate(const SolitonProfile& prof, const Field& w, const ModulationState& sigma,
                    const AlphaCoefficients& alpha, double muDot, const Potential& pot);

struct CoercivityResult {
    double rho2 = 0.0;    // min over the two blocks
    double block1 = 0.0;  // operator seen by Re(w), constraints {eta, x_k eta}
    double block2 = 0.0;  // operator seen by Im(w), constraints {d_k eta, d_mu eta}
};

// Smallest generalized Rayleigh quotient <L w, w> / ||w||_H1^2, optionally on
// the complement of the pairing directions (dense eigensolve; 1D grids).
CoercivityResult coercivityEstimate(const SolitonProfile& prof, const Nonlinearity& nl,
                                    bool projected = true);

} // namespace solwave
