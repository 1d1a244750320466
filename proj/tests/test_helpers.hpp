#pragma once

#include <cmath>
#include <random>

#include "solwave/grid.hpp"

namespace solwave::testing {

// Smooth complex test field: a handful of low-wavenumber modes under a
// Gaussian envelope, so it is effectively band-limited and decays at the box
// edge.
inline Field randomSmoothField(const GridSpec& g, std::mt19937_64& rng,
                               int maxMode = 8, double envelopeFrac = 0.125) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Field u(g);
    const double x0 = envelopeFrac * g.L;
    if (g.d == 1) {
        std::vector<Complex> coef(2 * maxMode + 1);
        for (auto& c : coef) c = Complex(gauss(rng), gauss(rng));
        for (int i = 0; i < g.N; ++i) {
            const double x = g.axisCoord(i);
            Complex val(0.0, 0.0);
            for (int n = -maxMode; n <= maxMode; ++n) {
                const double k = M_PI * n / g.L;
                const double damp = std::exp(-0.5 * (double)n * n / (maxMode * maxMode / 4.0 + 1.0));
                val += coef[n + maxMode] * damp * std::exp(Complex(0.0, k * x));
            }
            u.v[i] = val * std::exp(-x * x / (2.0 * x0 * x0));
        }
    } else {
        std::vector<Complex> coef((2 * maxMode + 1) * (2 * maxMode + 1));
        for (auto& c : coef) c = Complex(gauss(rng), gauss(rng));
        int sub[2];
        for (std::size_t i = 0; i < u.size(); ++i) {
            g.unflatten(i, sub);
            const double x = g.axisCoord(sub[0]);
            const double y = g.axisCoord(sub[1]);
            Complex val(0.0, 0.0);
            for (int n = -maxMode; n <= maxMode; ++n)
                for (int m = -maxMode; m <= maxMode; ++m) {
                    const double damp =
                        std::exp(-0.5 * (double)(n * n + m * m) / (maxMode * maxMode / 4.0 + 1.0));
                    val += coef[(n + maxMode) * (2 * maxMode + 1) + (m + maxMode)] * damp *
                           std::exp(Complex(0.0, M_PI * (n * x + m * y) / g.L));
                }
            u.v[i] = val * std::exp(-(x * x + y * y) / (2.0 * x0 * x0));
        }
    }
    return u;
}

inline double supNorm(const Field& u) {
    double m = 0.0;
    for (const auto& z : u.v) m = std::max(m, std::abs(z));
    return m;
}

inline double supDiff(const Field& u, const Field& w) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u.v[i] - w.v[i]));
    return m;
}

} // namespace solwave::testing
