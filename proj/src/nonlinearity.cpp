#include "solwave/nonlinearity.hpp"

#include <cmath>

namespace solwave {

namespace {

constexpr double kVacuumFloor = 1e-300;

double powAbs(double m2, double expOver2) {
    // |psi|^s with |psi|^2 = m2; vacuum points map to 0.
    if (m2 < kVacuumFloor) return 0.0;
    return std::pow(m2, expOver2);
}

} // namespace

Nonlinearity Nonlinearity::localPower(double lambda, double s) {
    Nonlinearity nl;
    nl.kind = Kind::LocalPower;
    nl.lambda = lambda;
    nl.s = s;
    return nl;
}

Nonlinearity Nonlinearity::twoPower(double beta, double lambda, double s1, double s2) {
    Nonlinearity nl;
    nl.kind = Kind::TwoPower;
    nl.beta = beta;
    nl.lambda = lambda;
    nl.s1 = s1;
    nl.s2 = s2;
    return nl;
}

Nonlinearity Nonlinearity::hartree(double lambda, Kernel kernel, double width) {
    Nonlinearity nl;
    nl.kind = Kind::Hartree;
    nl.lambda = lambda;
    nl.kernel = kernel;
    nl.kernelWidth = width;
    return nl;
}

void Nonlinearity::validateFor(int d) const {
    const double sCrit = 4.0 / d;
    switch (kind) {
        case Kind::LocalPower:
            if (lambda <= 0.0) throw ConfigError("nonlinearity: lambda must be positive");
            if (s <= 0.0 || s >= sCrit) throw ConfigError("nonlinearity: need 0 < s < 4/d");
            break;
        case Kind::TwoPower:
            if (lambda <= 0.0) throw ConfigError("nonlinearity: lambda must be positive");
            if (!(0.0 < s1 && s1 < s2 && s2 < sCrit))
                throw ConfigError("nonlinearity: need 0 < s1 < s2 < 4/d");
            break;
        case Kind::Hartree:
            if (lambda <= 0.0) throw ConfigError("nonlinearity: lambda must be positive");
            if (kernelWidth <= 0.0) throw ConfigError("nonlinearity: kernel width must be positive");
            break;
    }
}

Field hartreeKernelField(const Nonlinearity& nl, const GridSpec& g) {
    Field kern(g);
    int sub[2];
    for (std::size_t i = 0; i < kern.size(); ++i) {
        g.unflatten(i, sub);
        double r2 = 0.0;
        for (int ax = 0; ax < g.d; ++ax) {
            const int m = sub[ax];
            const double x = (m <= g.N / 2 ? m : m - g.N) * g.h();
            r2 += x * x;
        }
        const double w = nl.kernelWidth;
        double val;
        if (nl.kernel == Nonlinearity::Kernel::Gaussian)
            val = std::exp(-r2 / (2.0 * w * w));
        else {
            const double c = std::cosh(std::sqrt(r2) / w);
            val = 1.0 / (c * c);
        }
        kern.v[i] = Complex(val, 0.0);
    }
    return kern;
}

Field convolve(const Field& kernel, const Field& g) {
    requireSameGrid(kernel, g);
    Field prod = mulPointwise(fft(kernel), fft(g));
    Field out = ifft(prod);
    const double w = quadratureWeight(g.grid);
    for (auto& z : out.v) z *= w;
    return out;
}

namespace {

Field hartreePotential(const Nonlinearity& nl, const Field& density) {
    Field kern = hartreeKernelField(nl, density.grid);
    return convolve(kern, density);
}

Field absSquared(const Field& psi) {
    Field out(psi.grid);
    for (std::size_t i = 0; i < psi.size(); ++i) out.v[i] = Complex(std::norm(psi.v[i]), 0.0);
    return out;
}

} // namespace

Field evalF(const Nonlinearity& nl, const Field& psi) {
    nl.validateFor(psi.grid.d);
    Field out(psi.grid);
    switch (nl.kind) {
        case Nonlinearity::Kind::LocalPower:
            for (std::size_t i = 0; i < psi.size(); ++i)
                out.v[i] = nl.lambda * powAbs(std::norm(psi.v[i]), nl.s / 2.0) * psi.v[i];
            break;
        case Nonlinearity::Kind::TwoPower:
            for (std::size_t i = 0; i < psi.size(); ++i) {
                const double m2 = std::norm(psi.v[i]);
                out.v[i] = (nl.beta * powAbs(m2, nl.s1 / 2.0) +
                            nl.lambda * powAbs(m2, nl.s2 / 2.0)) * psi.v[i];
            }
            break;
        case Nonlinearity::Kind::Hartree: {
            Field pot = hartreePotential(nl, absSquared(psi));
            for (std::size_t i = 0; i < psi.size(); ++i)
                out.v[i] = nl.lambda * pot.v[i].real() * psi.v[i];
            break;
        }
    }
    return out;
}

double evalFunctional(const Nonlinearity& nl, const Field& psi) {
    nl.validateFor(psi.grid.d);
    const double w = quadratureWeight(psi.grid);
    switch (nl.kind) {
        case Nonlinearity::Kind::LocalPower: {
            double s = 0.0;
            for (const auto& z : psi.v) s += powAbs(std::norm(z), (nl.s + 2.0) / 2.0);
            return nl.lambda / (nl.s + 2.0) * w * s;
        }
        case Nonlinearity::Kind::TwoPower: {
            double sa = 0.0, sb = 0.0;
            for (const auto& z : psi.v) {
                const double m2 = std::norm(z);
                sa += powAbs(m2, (nl.s1 + 2.0) / 2.0);
                sb += powAbs(m2, (nl.s2 + 2.0) / 2.0);
            }
            return w * (nl.beta / (nl.s1 + 2.0) * sa + nl.lambda / (nl.s2 + 2.0) * sb);
        }
        case Nonlinearity::Kind::Hartree: {
            Field dens = absSquared(psi);
            Field pot = hartreePotential(nl, dens);
            double s = 0.0;
            for (std::size_t i = 0; i < psi.size(); ++i)
                s += pot.v[i].real() * dens.v[i].real();
            return nl.lambda / 4.0 * w * s;
        }
    }
    return 0.0;
}

namespace {

// Pointwise multipliers seen by the real and imaginary blocks of f'(eta)
// for local nonlinearities: f1 = (1+s) lambda eta^s, f2 = lambda eta^s.
void localBlockCoeffs(const Nonlinearity& nl, const Field& eta, Field& f1, Field& f2) {
    f1 = Field(eta.grid);
    f2 = Field(eta.grid);
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double m2 = std::norm(eta.v[i]);
        double a = 0.0, b = 0.0;
        if (nl.kind == Nonlinearity::Kind::LocalPower) {
            const double es = nl.lambda * powAbs(m2, nl.s / 2.0);
            a = (1.0 + nl.s) * es;
            b = es;
        } else {
            const double e1 = nl.beta * powAbs(m2, nl.s1 / 2.0);
            const double e2 = nl.lambda * powAbs(m2, nl.s2 / 2.0);
            a = (1.0 + nl.s1) * e1 + (1.0 + nl.s2) * e2;
            b = e1 + e2;
        }
        f1.v[i] = Complex(a, 0.0);
        f2.v[i] = Complex(b, 0.0);
    }
}

} // namespace

Field linearizedApply(const Nonlinearity& nl, const Field& eta, double mu, const Field& w) {
    requireSameGrid(eta, w);
    Field out = laplacian(w);
    for (std::size_t i = 0; i < out.size(); ++i) out.v[i] = -out.v[i] + mu * w.v[i];

    if (nl.kind == Nonlinearity::Kind::Hartree) {
        Field dens = absSquared(eta);
        Field pot = hartreePotential(nl, dens);  // Phi * eta^2
        Field cross(eta.grid);                   // eta Re(w)
        for (std::size_t i = 0; i < eta.size(); ++i)
            cross.v[i] = Complex(eta.v[i].real() * w.v[i].real(), 0.0);
        Field potCross = hartreePotential(nl, cross);
        for (std::size_t i = 0; i < out.size(); ++i)
            out.v[i] -= nl.lambda * (pot.v[i].real() * w.v[i] +
                                     2.0 * potCross.v[i].real() * eta.v[i].real());
    } else {
        Field f1, f2;
        localBlockCoeffs(nl, eta, f1, f2);
        for (std::size_t i = 0; i < out.size(); ++i)
            out.v[i] -= Complex(f1.v[i].real() * w.v[i].real(),
                                f2.v[i].real() * w.v[i].imag());
    }
    return out;
}

Field linearBlockApply(const Nonlinearity& nl, const Field& eta, double mu,
                       const Field& vReal, int block) {
    requireSameGrid(eta, vReal);
    if (block != 1 && block != 2) throw ConfigError("linearBlockApply: block must be 1 or 2");
    Field w = (block == 1) ? realPart(vReal) : Complex(0.0, 1.0) * realPart(vReal);
    Field lw = linearizedApply(nl, eta, mu, w);
    return (block == 1) ? realPart(lw) : imagPart(lw);
}

Field remainderN(const Nonlinearity& nl, const Field& eta, const Field& w) {
    requireSameGrid(eta, w);
    Field sum = eta + w;
    Field fSum = evalF(nl, sum);
    Field fEta = evalF(nl, eta);
    Field fpw = linearizedApply(nl, eta, 0.0, w);
    // linearizedApply with mu=0 gives -Lap w - f'(eta) w; recover f'(eta) w.
    Field lap = laplacian(w);
    Field out(eta.grid);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Complex fprimeW = -(fpw.v[i] + lap.v[i]);
        out.v[i] = -fSum.v[i] + fEta.v[i] + fprimeW;
    }
    return out;
}

} // namespace solwave
