#include "solwave/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

namespace solwave {

namespace {

Field residualField(const Nonlinearity& nl, const Field& eta, double mu, const Field* confine) {
    Field r = laplacian(eta);
    Field feta = evalF(nl, eta);
    Field out(eta.grid);
    for (std::size_t i = 0; i < eta.size(); ++i) {
        out.v[i] = -r.v[i] + mu * eta.v[i] - feta.v[i];
        if (confine) out.v[i] += confine->v[i] * eta.v[i];
    }
    return out;
}

void evenSymmetrize(Field& u) {
    const GridSpec& g = u.grid;
    const int N = g.N;
    if (g.d == 1) {
        for (int i = 1; i < N / 2; ++i) {
            const double avg = 0.5 * (u.v[i].real() + u.v[N - i].real());
            u.v[i] = Complex(avg, 0.0);
            u.v[N - i] = Complex(avg, 0.0);
        }
        u.v[0] = Complex(u.v[0].real(), 0.0);
        u.v[N / 2] = Complex(u.v[N / 2].real(), 0.0);
    } else {
        auto idx = [N](int i, int j) { return static_cast<std::size_t>(i) * N + j; };
        auto refl = [N](int i) { return i == 0 ? 0 : N - i; };
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                const double avg = 0.25 * (u.v[idx(i, j)].real() + u.v[idx(refl(i), j)].real() +
                                           u.v[idx(i, refl(j))].real() + u.v[idx(refl(i), refl(j))].real());
                u.v[idx(i, j)] = Complex(avg, 0.0);
            }
    }
}

double fieldMass(const Field& u) { return 0.5 * innerRe(u, u); }

void renormalizeMass(Field& u, double targetMass) {
    const double cur = fieldMass(u);
    if (cur < 1e-16) throw CollapseToZero("ground state collapsed to zero");
    const double scale = std::sqrt(targetMass / cur);
    for (auto& z : u.v) z *= scale;
}

Field defaultGuess(const GridSpec& g, double mu) {
    Field u(g);
    int sub[2];
    const double k = std::sqrt(mu);
    for (std::size_t i = 0; i < u.size(); ++i) {
        g.unflatten(i, sub);
        double r2 = 0.0;
        for (int ax = 0; ax < g.d; ++ax) {
            const double x = g.axisCoord(sub[ax]);
            r2 += x * x;
        }
        u.v[i] = Complex(std::sqrt(2.0 * mu) / std::cosh(k * std::sqrt(r2)), 0.0);
    }
    return u;
}

// One semi-implicit descent step on E_mu (+ confinement), then mass
// renormalization and even projection.
void flowStep(Field& eta, const Nonlinearity& nl, double mu, const Field* confine,
              double dtau, double targetMass) {
    Field feta = evalF(nl, eta);
    Field rhs(eta.grid);
    for (std::size_t i = 0; i < eta.size(); ++i) {
        Complex drive = feta.v[i];
        if (confine) drive -= confine->v[i] * eta.v[i];
        rhs.v[i] = eta.v[i] + dtau * drive;
    }
    Field hat = fft(rhs);
    const GridSpec& g = eta.grid;
    int sub[2];
    for (std::size_t i = 0; i < hat.size(); ++i) {
        g.unflatten(i, sub);
        double k2 = 0.0;
        for (int ax = 0; ax < g.d; ++ax) {
            const double k = g.axisWavenumber(sub[ax]);
            k2 += k * k;
        }
        hat.v[i] /= 1.0 + dtau * (k2 + mu);
    }
    eta = ifft(hat);
    for (auto& z : eta.v) z = Complex(z.real(), 0.0);
    evenSymmetrize(eta);
    renormalizeMass(eta, targetMass);
}

// Dense Jacobian of the residual at fixed mu (real block 1 plus confinement),
// built by applying the operator to unit vectors. 1D sizes only.
Eigen::MatrixXd denseJacobian(const Nonlinearity& nl, const Field& eta, double mu,
                              const Field* confine) {
    const std::size_t n = eta.size();
    Eigen::MatrixXd J(n, n);
    Field unit(eta.grid);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(unit.v.begin(), unit.v.end(), Complex(0.0, 0.0));
        unit.v[j] = Complex(1.0, 0.0);
        Field col = linearBlockApply(nl, eta, mu, unit, 1);
        for (std::size_t i = 0; i < n; ++i) {
            double val = col.v[i].real();
            if (confine) val += confine->v[i].real() * (i == j ? 1.0 : 0.0);
            J(i, j) = val;
        }
    }
    return J;
}

SolitonProfile solveCore(const Nonlinearity& nl, double mu, const GridSpec& g,
                         const GroundStateOptions& opts) {
    nl.validateFor(g.d);
    if (mu <= 0.0) throw ConfigError("solveGroundState: mu must be positive");

    Field eta = opts.guess ? *opts.guess : defaultGuess(g, mu);
    for (auto& z : eta.v) z = Complex(z.real(), 0.0);
    evenSymmetrize(eta);

    double confMax = 0.0;
    if (opts.confine)
        for (const auto& z : opts.confine->v) confMax = std::max(confMax, std::abs(z.real()));
    const double dtau = 0.5 / (1.0 + mu + confMax);

    double targetMass = fieldMass(eta);
    double prevMass = 0.0, prevMultiplier = 0.0;
    bool havePrev = false;

    const bool canPolish = g.size() <= 2048;
    const double flowTarget = canPolish ? std::max(opts.tol, 1e-7) : opts.tol;
    int step = 0;
    auto etaScale = [&] { return l2Norm(eta); };
    while (step < opts.maxFlowSteps) {
        for (int inner = 0; inner < 20 && step < opts.maxFlowSteps; ++inner, ++step)
            flowStep(eta, nl, mu, opts.confine, dtau, targetMass);

        Field r = residualField(nl, eta, mu, opts.confine);
        const double nrm = etaScale();
        if (nrm < 1e-8) throw CollapseToZero("ground state collapsed to zero");
        const double multiplier = innerRe(r, eta) / (nrm * nrm);
        Field shape = r - multiplier * eta;
        const double shapeRes = l2Norm(shape) / nrm;
        const double fullRes = l2Norm(r) / nrm;

        if (fullRes < flowTarget) break;

        if (shapeRes < 0.2 * std::abs(multiplier) + 1e-12) {
            // Shape converged at the wrong multiplier: secant update of the
            // trial mass drives the multiplier to zero.
            double next;
            if (havePrev && std::abs(multiplier - prevMultiplier) > 1e-15) {
                next = targetMass - multiplier * (targetMass - prevMass) / (multiplier - prevMultiplier);
            } else {
                next = targetMass * (1.0 + 0.2 * multiplier / mu);
            }
            if (!(next > 1e-12)) next = 0.5 * targetMass;
            prevMass = targetMass;
            prevMultiplier = multiplier;
            havePrev = true;
            targetMass = next;
        }
    }

    // Newton polish at fixed mu (dense solve; 1D sizes).
    if (canPolish) {
        for (int it = 0; it < opts.maxNewtonSteps; ++it) {
            Field r = residualField(nl, eta, mu, opts.confine);
            const double nrm = etaScale();
            if (nrm < 1e-8) throw CollapseToZero("ground state collapsed to zero");
            if (l2Norm(r) <= opts.tol * nrm) break;
            Eigen::MatrixXd J = denseJacobian(nl, eta, mu, opts.confine);
            Eigen::VectorXd rhs(eta.size());
            for (std::size_t i = 0; i < eta.size(); ++i) rhs[i] = r.v[i].real();
            Eigen::VectorXd delta = J.partialPivLu().solve(rhs);
            for (std::size_t i = 0; i < eta.size(); ++i)
                eta.v[i] -= Complex(delta[i], 0.0);
            evenSymmetrize(eta);
        }
    }

    SolitonProfile prof;
    prof.mu = mu;
    prof.grid = g;
    prof.eta = eta;
    prof.mass = fieldMass(eta);
    prof.residual = l2Norm(residualField(nl, eta, mu, opts.confine));
    if (prof.residual > opts.tol * etaScale() * 10.0)
        throw NonConvergence("ground state residual did not reach tolerance");
    return prof;
}

} // namespace

SolitonProfile closedFormCubic1D(double mu, double lambda, const GridSpec& g) {
    if (g.d != 1) throw ConfigError("closedFormCubic1D: requires d = 1");
    if (mu <= 0.0 || lambda <= 0.0) throw ConfigError("closedFormCubic1D: mu, lambda > 0");

    SolitonProfile prof;
    prof.mu = mu;
    prof.grid = g;
    prof.eta = Field(g);
    prof.dMuEta = Field(g);
    prof.d2MuEta = Field(g);

    const double k = std::sqrt(mu);
    const double c = std::sqrt(2.0 / lambda);
    for (int i = 0; i < g.N; ++i) {
        const double x = g.axisCoord(i);
        const double s = 1.0 / std::cosh(k * x);
        const double t = std::tanh(k * x);
        const double sp = -s * t;            // s'(kx)
        const double spp = s * (1.0 - 2.0 * s * s);  // s''(kx)
        prof.eta.v[i] = Complex(c * k * s, 0.0);
        prof.dMuEta.v[i] = Complex(c * (s + k * x * sp) / (2.0 * k), 0.0);
        prof.d2MuEta.v[i] = Complex(
            c * (-(s + k * x * sp) / (4.0 * k * k * k) +
                 (2.0 * x * sp + k * x * x * spp) / (4.0 * k * k)),
            0.0);
    }
    prof.mass = 2.0 * std::sqrt(mu) / lambda;
    prof.massSlope = 1.0 / (lambda * std::sqrt(mu));

    Field r = residualField(Nonlinearity::cubic(lambda), prof.eta, mu, nullptr);
    prof.residual = l2Norm(r);
    return prof;
}

SolitonProfile solveGroundState(const Nonlinearity& nl, double mu, const GridSpec& g,
                                const GroundStateOptions& opts) {
    SolitonProfile prof = solveCore(nl, mu, g, opts);

    if (opts.fillDerivatives) {
        const double dmu = 1e-4 * mu;
        GroundStateOptions side = opts;
        side.fillDerivatives = false;
        side.guess = &prof.eta;
        SolitonProfile plus = solveCore(nl, mu + dmu, g, side);
        SolitonProfile minus = solveCore(nl, mu - dmu, g, side);
        prof.dMuEta = Field(g);
        for (std::size_t i = 0; i < prof.eta.size(); ++i)
            prof.dMuEta.v[i] = (plus.eta.v[i] - minus.eta.v[i]) / (2.0 * dmu);
        prof.massSlope = (plus.mass - minus.mass) / (2.0 * dmu);
        if (prof.massSlope <= 0.0)
            throw StabilityViolation("mass curve slope m'(mu) <= 0");

        // Wider stencil for the second derivative; the tight one would
        // amplify solver noise by 1/dmu^2.
        const double dmu2 = 1e-2 * mu;
        SolitonProfile plus2 = solveCore(nl, mu + dmu2, g, side);
        SolitonProfile minus2 = solveCore(nl, mu - dmu2, g, side);
        prof.d2MuEta = Field(g);
        for (std::size_t i = 0; i < prof.eta.size(); ++i)
            prof.d2MuEta.v[i] =
                (plus2.eta.v[i] - 2.0 * prof.eta.v[i] + minus2.eta.v[i]) / (dmu2 * dmu2);
    }
    return prof;
}

MassCurve massCurve(const Nonlinearity& nl, double mu, const GridSpec& g, double dmu) {
    if (nl.kind == Nonlinearity::Kind::LocalPower && nl.s == 2.0 && g.d == 1) {
        MassCurve mc;
        mc.m = 2.0 * std::sqrt(mu) / nl.lambda;
        mc.mPrime = 1.0 / (nl.lambda * std::sqrt(mu));
        return mc;
    }
    if (dmu <= 0.0) dmu = 1e-4 * mu;
    GroundStateOptions opts;
    opts.fillDerivatives = false;
    SolitonProfile center = solveCore(nl, mu, g, opts);
    GroundStateOptions side = opts;
    side.guess = &center.eta;
    SolitonProfile plus = solveCore(nl, mu + dmu, g, side);
    SolitonProfile minus = solveCore(nl, mu - dmu, g, side);
    MassCurve mc;
    mc.m = center.mass;
    mc.mPrime = (plus.mass - minus.mass) / (2.0 * dmu);
    if (mc.mPrime <= 0.0) throw StabilityViolation("mass curve slope m'(mu) <= 0");
    return mc;
}

TangentBasis tangentBasis(const SolitonProfile& prof) {
    TangentBasis tb;
    for (int ax = 0; ax < prof.grid.d; ++ax)
        tb.zTrans.push_back(-1.0 * spectralDerive(prof.eta, ax, 1));
    tb.zGauge = Complex(0.0, 1.0) * prof.eta;
    for (int ax = 0; ax < prof.grid.d; ++ax)
        tb.zBoost.push_back(Complex(0.0, 1.0) * mulCoord(prof.eta, ax));
    tb.zScale = prof.dMuEta;
    return tb;
}

double ProfileFamily::invertMass(double targetMass) const {
    auto [lo, hi] = admissibleRange();
    double mLo = massAt(lo), mHi = massAt(hi);
    if (mLo > mHi) throw StabilityViolation("mass curve not increasing over the admissible range");
    if (targetMass < mLo - 1e-12 || targetMass > mHi + 1e-12)
        throw MassOutOfRange("mass outside the admissible branch");
    double a = lo, b = hi;
    for (int it = 0; it < 200 && (b - a) > 1e-14 * (1.0 + b); ++it) {
        const double mid = 0.5 * (a + b);
        if (massAt(mid) < targetMass)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

CubicProfileFamily::CubicProfileFamily(double lambda, const GridSpec& g,
                                       std::pair<double, double> range)
    : lambda_(lambda), g_(g), nl_(Nonlinearity::cubic(lambda)), range_(range) {
    if (g.d != 1) throw ConfigError("CubicProfileFamily: requires d = 1");
}

SolitonProfile CubicProfileFamily::at(double mu) const {
    return closedFormCubic1D(mu, lambda_, g_);
}

SolvedProfileFamily::SolvedProfileFamily(const Nonlinearity& nl, const GridSpec& g,
                                         std::pair<double, double> range, double tol)
    : nl_(nl), g_(g), range_(range), tol_(tol) {}

SolitonProfile SolvedProfileFamily::at(double mu) const {
    std::lock_guard<std::mutex> lock(mtx_);
    auto it = cache_.find(mu);
    if (it != cache_.end()) return it->second;

    GroundStateOptions opts;
    opts.tol = tol_;
    const Field* warm = nullptr;
    if (!cache_.empty()) {
        auto nearest = cache_.lower_bound(mu);
        if (nearest == cache_.end()) --nearest;
        else if (nearest != cache_.begin()) {
            auto prev = std::prev(nearest);
            if (mu - prev->first < nearest->first - mu) nearest = prev;
        }
        warm = &nearest->second.eta;
    }
    opts.guess = warm;
    SolitonProfile prof = solveGroundState(nl_, mu, g_, opts);
    auto [pos, inserted] = cache_.emplace(mu, std::move(prof));
    if (cache_.size() > 512) cache_.erase(cache_.begin());
    return pos->second;
}

TaylorProfileFamily::TaylorProfileFamily(const Nonlinearity& nl, double mu0, Field eta0,
                                         Field dMuEta0, Field d2MuEta0,
                                         std::pair<double, double> range)
    : nl_(nl), g_(eta0.grid), mu0_(mu0), eta0_(std::move(eta0)),
      dMuEta0_(std::move(dMuEta0)), d2MuEta0_(std::move(d2MuEta0)), range_(range) {}

SolitonProfile TaylorProfileFamily::at(double mu) const {
    const double dmu = mu - mu0_;
    SolitonProfile prof;
    prof.mu = mu;
    prof.grid = g_;
    prof.eta = Field(g_);
    prof.dMuEta = Field(g_);
    prof.d2MuEta = d2MuEta0_;
    for (std::size_t i = 0; i < prof.eta.size(); ++i) {
        prof.eta.v[i] = eta0_.v[i] + dmu * dMuEta0_.v[i] + 0.5 * dmu * dmu * d2MuEta0_.v[i];
        prof.dMuEta.v[i] = dMuEta0_.v[i] + dmu * d2MuEta0_.v[i];
    }
    prof.mass = 0.5 * innerRe(prof.eta, prof.eta);
    prof.massSlope = innerRe(prof.eta, prof.dMuEta);
    prof.residual = 0.0;
    return prof;
}

void writeProfileTable(const std::string& path, const SolitonProfile& prof) {
    if (prof.grid.d != 1) throw ConfigError("writeProfileTable: 1D only");
    std::ofstream out(path);
    if (!out) throw ConfigError("writeProfileTable: cannot open " + path);
    char buf[80];
    for (int i = 0; i < prof.grid.N; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", prof.grid.axisCoord(i),
                      prof.eta.v[i].real());
        out << buf;
    }
}

Field readProfileTable(const std::string& path, const GridSpec& g) {
    if (g.d != 1) throw ConfigError("readProfileTable: 1D only");
    std::ifstream in(path);
    if (!in) throw ConfigError("readProfileTable: cannot open " + path);
    Field eta(g);
    std::string line;
    int i = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double x, val;
        if (!(ss >> x >> val)) throw ConfigError("readProfileTable: malformed line");
        if (i >= g.N) throw ConfigError("readProfileTable: too many rows for grid");
        if (std::abs(x - g.axisCoord(i)) > 1e-9)
            throw ConfigError("readProfileTable: grid coordinates do not match");
        eta.v[i++] = Complex(val, 0.0);
    }
    if (i != g.N) throw ConfigError("readProfileTable: row count does not match grid");
    return eta;
}

} // namespace solwave
