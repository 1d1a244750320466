#pragma once

#include "solwave/grid.hpp"

namespace solwave {

// Self-interaction f(psi). Local powers act pointwise; Hartree couples
// through a convolution kernel evaluated spectrally.
struct Nonlinearity {
    enum class Kind { LocalPower, TwoPower, Hartree };
    enum class Kernel { Gaussian, Sech2 };

    Kind kind = Kind::LocalPower;

    // LocalPower: f = lambda |psi|^s psi, 0 < s < 4/d.
    double lambda = 1.0;
    double s = 2.0;

    // TwoPower: f = beta |psi|^{s1} psi + lambda |psi|^{s2} psi, 0 < s1 < s2 < 4/d.
    double beta = 0.0;
    double s1 = 1.0;
    double s2 = 2.0;

    // Hartree: f = lambda (Phi * |psi|^2) psi.
    Kernel kernel = Kernel::Gaussian;
    double kernelWidth = 1.0;

    static Nonlinearity localPower(double lambda, double s);
    static Nonlinearity cubic(double lambda) { return localPower(lambda, 2.0); }
    static Nonlinearity twoPower(double beta, double lambda, double s1, double s2);
    static Nonlinearity hartree(double lambda, Kernel kernel, double width);

    void validateFor(int d) const;
};

// Kernel samples arranged for circular convolution (index m holds the
// displacement (m <= N/2 ? m : m-N) * h per axis).
Field hartreeKernelField(const Nonlinearity& nl, const GridSpec& g);

// Quadrature-weighted circular convolution Phi * g.
Field convolve(const Field& kernel, const Field& g);

Field evalF(const Nonlinearity& nl, const Field& psi);
double evalFunctional(const Nonlinearity& nl, const Field& psi);

// L_eta w = -Lap w + mu w - f'(eta) w for a real positive profile eta.
Field linearizedApply(const Nonlinearity& nl, const Field& eta, double mu, const Field& w);

// Block action on a real field: block 1 is the operator seen by Re(w),
// block 2 the one seen by Im(w).
Field linearBlockApply(const Nonlinearity& nl, const Field& eta, double mu,
                       const Field& vReal, int block);

// N(w) = -f(eta + w) + f(eta) + f'(eta) w.
Field remainderN(const Nonlinearity& nl, const Field& eta, const Field& w);

} // namespace solwave
