#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "solwave/errors.hpp"

namespace solwave {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;

// Periodic box [-L, L)^d sampled with N points per axis, h = 2L/N.
// Wavenumbers are k_n = pi*n/L, n in [-N/2, N/2).
struct GridSpec {
    int d = 1;
    int N = 0;
    double L = 0.0;

    GridSpec() = default;
    GridSpec(int d_, int N_, double L_);

    double h() const { return 2.0 * L / N; }
    std::size_t size() const;
    // Coordinate of grid index i along one axis: -L + i*h.
    double axisCoord(int i) const { return -L + h() * i; }
    // Wavenumber of FFT bin j along one axis.
    double axisWavenumber(int j) const;
    // Decompose a flat row-major index into per-axis indices.
    void unflatten(std::size_t idx, int* sub) const;

    bool operator==(const GridSpec& o) const {
        return d == o.d && N == o.N && L == o.L;
    }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

struct Field {
    GridSpec grid;
    std::vector<Complex> v;

    Field() = default;
    explicit Field(const GridSpec& g) : grid(g), v(g.size(), Complex(0.0, 0.0)) {}

    std::size_t size() const { return v.size(); }
    Complex& operator[](std::size_t i) { return v[i]; }
    const Complex& operator[](std::size_t i) const { return v[i]; }
    bool allFinite() const;
};

struct SymmetryParams {
    Vec a;        // position
    Vec p;        // momentum
    double gamma = 0.0;  // phase, wrapped to [0, 2*pi)

    SymmetryParams() : a(Vec::Zero(1)), p(Vec::Zero(1)) {}
    SymmetryParams(Vec a_, Vec p_, double gamma_);
};

double wrapAngle(double gamma);  // into [0, 2*pi)

void requireSameGrid(const Field& u, const Field& w);

// Field arithmetic (pure, value-returning).
Field operator+(const Field& u, const Field& w);
Field operator-(const Field& u, const Field& w);
Field operator*(Complex c, const Field& u);
Field operator*(double c, const Field& u);
Field mulPointwise(const Field& u, const Field& w);
Field conjField(const Field& u);
Field realPart(const Field& u);
Field imagPart(const Field& u);

// Field of coordinate values x_axis on the grid (real-valued).
Field coordField(const GridSpec& g, int axis);
// u multiplied by the coordinate along `axis`.
Field mulCoord(const Field& u, int axis);

// Quadrature: trapezoid on the periodic grid, i.e. h^d * sum.
double quadratureWeight(const GridSpec& g);
Complex integrate(const Field& u);

// Re / Im of int u * conj(w) d^dx.
double innerRe(const Field& u, const Field& w);
double symForm(const Field& u, const Field& w);
double l2Norm(const Field& u);

// Forward/backward FFT (unnormalized forward; backward divides by N^d).
Field fft(const Field& u);
Field ifft(const Field& u);

// Fourier-multiplier derivative along `axis`, order 1 or 2.
// The Nyquist mode is zeroed for odd orders.
Field spectralDerive(const Field& u, int axis, int order);
Field laplacian(const Field& u);
std::vector<Field> gradient(const Field& u);

// (S_{a p gamma} g)(x) = exp(i p.(x-a) + i gamma) g(x-a); translation done
// spectrally so a need not be grid-aligned.
Field applySymmetry(const SymmetryParams& s, const Field& g);
Field applySymmetryInverse(const SymmetryParams& s, const Field& psi);
// Spectral translation alone: returns g(x - a).
Field translate(const Field& g, const Vec& a);

struct FieldNorms {
    double l2 = 0.0;
    double h1 = 0.0;
    double weighted = 0.0;
    double energy = 0.0;
};

// l2, H1, <epsV x>^{r/2}-weighted L2 and the energy norm
// (energy^2 = h1^2 + weighted^2). The weight uses the box coordinate.
FieldNorms norms(const Field& u, double epsV, double r);

// int x |u|^2 / int |u|^2 per axis.
Vec centroid(const Field& u);

} // namespace solwave
