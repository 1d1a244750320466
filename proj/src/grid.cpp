#include "solwave/grid.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

#include <fftw3.h>

namespace solwave {

GridSpec::GridSpec(int d_, int N_, double L_) : d(d_), N(N_), L(L_) {
    if (d < 1 || d > 2) throw ConfigError("grid: dimension must be 1 or 2");
    if (N < 16 || N % 2 != 0) throw ConfigError("grid: N must be even and >= 16");
    if (L <= 0.0) throw ConfigError("grid: L must be positive");
}

std::size_t GridSpec::size() const {
    std::size_t n = 1;
    for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(N);
    return n;
}

double GridSpec::axisWavenumber(int j) const {
    const int n = (j <= N / 2) ? j : j - N;
    return M_PI * n / L;
}

void GridSpec::unflatten(std::size_t idx, int* sub) const {
    for (int ax = d - 1; ax >= 0; --ax) {
        sub[ax] = static_cast<int>(idx % N);
        idx /= N;
    }
}

bool Field::allFinite() const {
    for (const auto& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

double wrapAngle(double gamma) {
    const double twoPi = 2.0 * M_PI;
    double g = std::fmod(gamma, twoPi);
    if (g < 0.0) g += twoPi;
    return g;
}

SymmetryParams::SymmetryParams(Vec a_, Vec p_, double gamma_)
    : a(std::move(a_)), p(std::move(p_)), gamma(wrapAngle(gamma_)) {}

void requireSameGrid(const Field& u, const Field& w) {
    if (u.grid != w.grid) throw GridMismatch("fields live on different grids");
}

Field operator+(const Field& u, const Field& w) {
    requireSameGrid(u, w);
    Field out(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) out.v[i] = u.v[i] + w.v[i];
    return out;
}

Field operator-(const Field& u, const Field& w) {
    requireSameGrid(u, w);
    Field out(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) out.v[i] = u.v[i] - w.v[i];
    return out;
}

Field operator*(Complex c, const Field& u) {
    Field out(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) out.v[i] = c * u.v[i];
    return out;
}

Field operator*(double c, const Field& u) { return Complex(c, 0.0) * u; }

Field mulPointwise(const Field& u, const Field& w) {
    requireSameGrid(u, w);
    Field out(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) out.v[i] = u.v[i] * w.v[i];
    return out;
}

Field conjField(const Field& u) {
    Field out(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) out.v[i] = std::conj(u.v[i]);
    return out;
}

Field realPart(const Field& u) {
    Field out(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) out.v[i] = Complex(u.v[i].real(), 0.0);
    return out;
}

Field imagPart(const Field& u) {
    Field out(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) out.v[i] = Complex(u.v[i].imag(), 0.0);
    return out;
}

Field coordField(const GridSpec& g, int axis) {
    if (axis < 0 || axis >= g.d) throw ConfigError("coordField: axis out of range");
    Field out(g);
    int sub[2];
    for (std::size_t i = 0; i < out.size(); ++i) {
        g.unflatten(i, sub);
        out.v[i] = Complex(g.axisCoord(sub[axis]), 0.0);
    }
    return out;
}

Field mulCoord(const Field& u, int axis) {
    if (axis < 0 || axis >= u.grid.d) throw ConfigError("mulCoord: axis out of range");
    Field out(u.grid);
    int sub[2];
    for (std::size_t i = 0; i < u.size(); ++i) {
        u.grid.unflatten(i, sub);
        out.v[i] = u.v[i] * u.grid.axisCoord(sub[axis]);
    }
    return out;
}

double quadratureWeight(const GridSpec& g) {
    double w = 1.0;
    for (int i = 0; i < g.d; ++i) w *= g.h();
    return w;
}

Complex integrate(const Field& u) {
    Complex s(0.0, 0.0);
    for (const auto& z : u.v) s += z;
    return quadratureWeight(u.grid) * s;
}

double innerRe(const Field& u, const Field& w) {
    requireSameGrid(u, w);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += u.v[i].real() * w.v[i].real() + u.v[i].imag() * w.v[i].imag();
    return quadratureWeight(u.grid) * s;
}

double symForm(const Field& u, const Field& w) {
    requireSameGrid(u, w);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += u.v[i].imag() * w.v[i].real() - u.v[i].real() * w.v[i].imag();
    return quadratureWeight(u.grid) * s;
}

double l2Norm(const Field& u) { return std::sqrt(innerRe(u, u)); }

namespace {

// Plan cache keyed by (d, N, sign). Plans are created with FFTW_UNALIGNED so
// they can be executed on any caller buffer via the new-array interface.
// FFTW_ESTIMATE keeps planning deterministic across processes.
struct PlanCache {
    std::mutex mtx;
    std::map<std::tuple<int, int, int>, fftw_plan> plans;

    fftw_plan get(const GridSpec& g, int sign) {
        std::lock_guard<std::mutex> lock(mtx);
        auto key = std::make_tuple(g.d, g.N, sign);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;
        std::vector<Complex> buf(g.size());
        auto* p = reinterpret_cast<fftw_complex*>(buf.data());
        fftw_plan plan = (g.d == 1)
            ? fftw_plan_dft_1d(g.N, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
            : fftw_plan_dft_2d(g.N, g.N, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans[key] = plan;
        return plan;
    }
};

PlanCache& planCache() {
    static PlanCache cache;
    return cache;
}

void executeDft(const GridSpec& g, int sign, Complex* data) {
    fftw_plan plan = planCache().get(g, sign);
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, p, p);
}

} // namespace

Field fft(const Field& u) {
    Field out = u;
    executeDft(u.grid, FFTW_FORWARD, out.v.data());
    return out;
}

Field ifft(const Field& u) {
    Field out = u;
    executeDft(u.grid, FFTW_BACKWARD, out.v.data());
    const double scale = 1.0 / static_cast<double>(u.size());
    for (auto& z : out.v) z *= scale;
    return out;
}

Field spectralDerive(const Field& u, int axis, int order) {
    if (axis < 0 || axis >= u.grid.d) throw ConfigError("spectralDerive: axis out of range");
    if (order != 1 && order != 2) throw ConfigError("spectralDerive: order must be 1 or 2");
    Field hat = fft(u);
    const GridSpec& g = u.grid;
    int sub[2];
    for (std::size_t i = 0; i < hat.size(); ++i) {
        g.unflatten(i, sub);
        const int j = sub[axis];
        const double k = g.axisWavenumber(j);
        if (order == 1) {
            // Nyquist mode dropped to keep real fields real.
            if (j == g.N / 2)
                hat.v[i] = Complex(0.0, 0.0);
            else
                hat.v[i] *= Complex(0.0, k);
        } else {
            hat.v[i] *= -k * k;
        }
    }
    return ifft(hat);
}

Field laplacian(const Field& u) {
    Field hat = fft(u);
    const GridSpec& g = u.grid;
    int sub[2];
    for (std::size_t i = 0; i < hat.size(); ++i) {
        g.unflatten(i, sub);
        double k2 = 0.0;
        for (int ax = 0; ax < g.d; ++ax) {
            const double k = g.axisWavenumber(sub[ax]);
            k2 += k * k;
        }
        hat.v[i] *= -k2;
    }
    return ifft(hat);
}

std::vector<Field> gradient(const Field& u) {
    std::vector<Field> out;
    out.reserve(u.grid.d);
    for (int ax = 0; ax < u.grid.d; ++ax) out.push_back(spectralDerive(u, ax, 1));
    return out;
}

Field translate(const Field& g, const Vec& a) {
    if (a.size() != g.grid.d) throw ConfigError("translate: shift dimension mismatch");
    Field hat = fft(g);
    const GridSpec& gr = g.grid;
    int sub[2];
    for (std::size_t i = 0; i < hat.size(); ++i) {
        gr.unflatten(i, sub);
        Complex factor(1.0, 0.0);
        for (int ax = 0; ax < gr.d; ++ax) {
            const int j = sub[ax];
            const double k = gr.axisWavenumber(j);
            if (j == gr.N / 2) {
                // Split Nyquist coefficient symmetrically: ramp becomes cos.
                factor *= std::cos(k * a[ax]);
            } else {
                factor *= std::exp(Complex(0.0, -k * a[ax]));
            }
        }
        hat.v[i] *= factor;
    }
    return ifft(hat);
}

Field applySymmetry(const SymmetryParams& s, const Field& g) {
    Field out = translate(g, s.a);
    const GridSpec& gr = g.grid;
    int sub[2];
    for (std::size_t i = 0; i < out.size(); ++i) {
        gr.unflatten(i, sub);
        double phase = s.gamma;
        for (int ax = 0; ax < gr.d; ++ax)
            phase += s.p[ax] * (gr.axisCoord(sub[ax]) - s.a[ax]);
        out.v[i] *= std::exp(Complex(0.0, phase));
    }
    return out;
}

Field applySymmetryInverse(const SymmetryParams& s, const Field& psi) {
    // (S^{-1} psi)(y) = exp(-i p.y - i gamma) psi(y + a)
    Field out = translate(psi, -s.a);
    const GridSpec& gr = psi.grid;
    int sub[2];
    for (std::size_t i = 0; i < out.size(); ++i) {
        gr.unflatten(i, sub);
        double phase = -s.gamma;
        for (int ax = 0; ax < gr.d; ++ax)
            phase -= s.p[ax] * gr.axisCoord(sub[ax]);
        out.v[i] *= std::exp(Complex(0.0, phase));
    }
    return out;
}

FieldNorms norms(const Field& u, double epsV, double r) {
    if (epsV <= 0.0) throw ConfigError("norms: epsV must be positive");
    if (r < 1.0) throw ConfigError("norms: r must be >= 1");
    FieldNorms n;
    const double l2sq = innerRe(u, u);
    double gradsq = 0.0;
    for (int ax = 0; ax < u.grid.d; ++ax) {
        Field du = spectralDerive(u, ax, 1);
        gradsq += innerRe(du, du);
    }
    double wsq = 0.0;
    {
        const GridSpec& g = u.grid;
        int sub[2];
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            g.unflatten(i, sub);
            double x2 = 0.0;
            for (int ax = 0; ax < g.d; ++ax) {
                const double x = g.axisCoord(sub[ax]);
                x2 += x * x;
            }
            const double weight = std::pow(1.0 + epsV * epsV * x2, r / 2.0);
            s += weight * std::norm(u.v[i]);
        }
        wsq = quadratureWeight(g) * s;
    }
    n.l2 = std::sqrt(l2sq);
    n.h1 = std::sqrt(l2sq + gradsq);
    n.weighted = std::sqrt(wsq);
    n.energy = std::sqrt(l2sq + gradsq + wsq);
    return n;
}

Vec centroid(const Field& u) {
    const double mass = innerRe(u, u);
    if (mass <= 0.0) throw ConfigError("centroid: zero field");
    Vec c = Vec::Zero(u.grid.d);
    const GridSpec& g = u.grid;
    int sub[2];
    for (std::size_t i = 0; i < u.size(); ++i) {
        g.unflatten(i, sub);
        const double dens = std::norm(u.v[i]);
        for (int ax = 0; ax < g.d; ++ax) c[ax] += g.axisCoord(sub[ax]) * dens;
    }
    c *= quadratureWeight(g) / mass;
    return c;
}

} // namespace solwave
