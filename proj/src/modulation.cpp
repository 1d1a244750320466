#include "solwave/modulation.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace solwave {

ClassicalState operator+(const ClassicalState& x, const ClassicalState& y) {
    return ClassicalState(x.a + y.a, x.p + y.p, x.gamma + y.gamma, x.mu + y.mu);
}

ClassicalState operator*(double c, const ClassicalState& x) {
    return ClassicalState(c * x.a, c * x.p, c * x.gamma, c * x.mu);
}

double AlphaCoefficients::norm() const {
    return std::sqrt(alphaTrans.squaredNorm() + alphaBoost.squaredNorm() +
                     alphaGauge * alphaGauge + alphaScale * alphaScale);
}

ClassicalState newtonianRHS(const ClassicalState& s, const Potential& pot) {
    return ClassicalState(Vec(2.0 * s.p), Vec(-pot.gradV(s.a)),
                          s.mu - pot.evalV(s.a) + s.p.squaredNorm(), 0.0);
}

ClassicalState effectiveRHS(const ClassicalState& s, const SolitonProfile& prof,
                            const Potential& pot) {
    ClassicalState dot = newtonianRHS(s, pot);
    dot.p = -gradEffectivePotential(pot, prof.eta, s.a);
    return dot;
}

namespace {

double pairRe(const Field& u, const Field& v) { return innerRe(u, v); }
double pairI(const Field& u, const Field& w) {
    return innerRe(u, Complex(0.0, 1.0) * w);  // <u, i w>
}

} // namespace

ModulationRHS fullModulationRHS(const ModulationState& sigma, const Field& w,
                                const ProfileFamily& family, const Potential& pot,
                                const Nonlinearity& nl) {
    const int d = w.grid.d;
    const int n = 2 * d + 2;
    SolitonProfile prof = family.at(sigma.mu);
    const Field& eta = prof.eta;
    const double m = prof.mass;
    const double mp = prof.massSlope;

    Field rv = rvField(pot, w.grid, sigma.a);
    std::vector<Field> dXrv = gradXRVFields(pot, w.grid, sigma.a);
    Field nw = remainderN(nl, eta, w);
    Field forcing = nw + mulPointwise(rv, w);  // N(w) + R_V w

    // Generator list K_j applied to a field: d_{x_j}, i x_j, i, d_mu.
    auto applyGenerators = [&](const Field& z, const Field& zMu) {
        std::vector<Field> out;
        for (int ax = 0; ax < d; ++ax) out.push_back(spectralDerive(z, ax, 1));
        for (int ax = 0; ax < d; ++ax) out.push_back(Complex(0.0, 1.0) * mulCoord(z, ax));
        out.push_back(Complex(0.0, 1.0) * z);
        out.push_back(zMu);
        return out;
    };

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    Vec rhs(n);
    const Complex iu(0.0, 1.0);

    // translation rows: m alpha_k + sum_j alpha_j <K_j (x_k eta), w> = <i x_k eta, N + R_V w>
    for (int k = 0; k < d; ++k) {
        Field xkEta = mulCoord(eta, k);
        Field xkEtaMu = mulCoord(prof.dMuEta, k);
        auto gens = applyGenerators(xkEta, xkEtaMu);
        for (int j = 0; j < n; ++j) M(k, j) = pairRe(gens[j], w);
        M(k, k) += m;
        rhs[k] = pairRe(iu * xkEta, forcing);
    }
    // boost rows: -m alpha_{d+k} + sum_j alpha_j <K_j d_k eta, i w>
    //           = -1/2 <(d_{x_k} R_V) eta, eta> + <d_k eta, N + R_V w>
    for (int k = 0; k < d; ++k) {
        Field dkEta = spectralDerive(eta, k, 1);
        Field dkEtaMu = spectralDerive(prof.dMuEta, k, 1);
        auto gens = applyGenerators(dkEta, dkEtaMu);
        for (int j = 0; j < n; ++j) M(d + k, j) = pairI(gens[j], w);
        M(d + k, d + k) -= m;
        rhs[d + k] = -0.5 * pairRe(mulPointwise(dXrv[k], eta), eta) + pairRe(dkEta, forcing);
    }
    // gauge row: m' alpha_g + sum_j alpha_j <K_j d_mu eta, i w>
    //          = <d_mu eta, N + R_V w> + <d_mu eta, R_V eta>
    {
        auto gens = applyGenerators(prof.dMuEta, prof.d2MuEta);
        for (int j = 0; j < n; ++j) M(2 * d, j) = pairI(gens[j], w);
        M(2 * d, 2 * d) += mp;
        rhs[2 * d] = pairRe(prof.dMuEta, forcing) + pairRe(prof.dMuEta, mulPointwise(rv, eta));
    }
    // scale row: -m' alpha_s + sum_j alpha_j <K_j eta, w> = <i eta, N + R_V w>
    {
        auto gens = applyGenerators(eta, prof.dMuEta);
        for (int j = 0; j < n; ++j) M(2 * d + 1, j) = pairRe(gens[j], w);
        M(2 * d + 1, 2 * d + 1) -= mp;
        rhs[2 * d + 1] = pairRe(iu * eta, forcing);
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
    if (!std::isfinite(cond) || cond > 1e12)
        throw SingularSystem("modulation system condition number exceeds 1e12");
    Vec alphaVec = svd.solve(rhs);

    ModulationRHS out;
    out.alpha = AlphaCoefficients(d);
    for (int k = 0; k < d; ++k) out.alpha.alphaTrans[k] = alphaVec[k];
    for (int k = 0; k < d; ++k) out.alpha.alphaBoost[k] = alphaVec[d + k];
    out.alpha.alphaGauge = alphaVec[2 * d];
    out.alpha.alphaScale = alphaVec[2 * d + 1];

    ClassicalState dot;
    dot.a = out.alpha.alphaTrans + 2.0 * sigma.p;
    dot.p = -out.alpha.alphaBoost - pot.gradV(sigma.a);
    dot.mu = -out.alpha.alphaScale;
    dot.gamma = sigma.mu - sigma.p.squaredNorm() + dot.a.dot(sigma.p) - pot.evalV(sigma.a) -
                out.alpha.alphaGauge;
    out.sigmaDot = dot;
    return out;
}

std::vector<AlphaCoefficients> alphaFromSeries(const std::vector<double>& times,
                                               const std::vector<ClassicalState>& sigmas,
                                               const Potential& pot) {
    const std::size_t n = times.size();
    if (n != sigmas.size()) throw ConfigError("alphaFromSeries: length mismatch");
    if (n < 5) throw SeriesTooShort("alphaFromSeries: need at least 5 samples");
    const double dt = times[1] - times[0];
    for (std::size_t k = 1; k + 1 < n; ++k)
        if (std::abs((times[k + 1] - times[k]) - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw ConfigError("alphaFromSeries: series must be uniformly sampled");

    auto derivative = [&](auto&& get) {
        std::vector<double> dot(n);
        for (std::size_t k = 0; k < n; ++k) {
            if (k >= 2 && k + 2 < n) {
                dot[k] = (-get(k + 2) + 8.0 * get(k + 1) - 8.0 * get(k - 1) + get(k - 2)) /
                         (12.0 * dt);
            } else if (k < 2) {
                const std::size_t b = 0;
                const double c0 = -25.0 / 12.0, c1 = 4.0, c2 = -3.0, c3 = 4.0 / 3.0,
                             c4 = -1.0 / 4.0;
                if (k == 0)
                    dot[k] = (c0 * get(b) + c1 * get(b + 1) + c2 * get(b + 2) + c3 * get(b + 3) +
                              c4 * get(b + 4)) / dt;
                else
                    dot[k] = (-0.25 * get(0) - (5.0 / 6.0) * get(1) + 1.5 * get(2) -
                              0.5 * get(3) + (1.0 / 12.0) * get(4)) / dt;
            } else {
                const std::size_t e = n - 1;
                if (k == e)
                    dot[k] = (25.0 / 12.0 * get(e) - 4.0 * get(e - 1) + 3.0 * get(e - 2) -
                              (4.0 / 3.0) * get(e - 3) + 0.25 * get(e - 4)) / dt;
                else
                    dot[k] = (0.25 * get(e) + (5.0 / 6.0) * get(e - 1) - 1.5 * get(e - 2) +
                              0.5 * get(e - 3) - (1.0 / 12.0) * get(e - 4)) / dt;
            }
        }
        return dot;
    };

    const int d = static_cast<int>(sigmas[0].a.size());
    std::vector<std::vector<double>> aDot(d), pDot(d);
    for (int ax = 0; ax < d; ++ax) {
        aDot[ax] = derivative([&](std::size_t k) { return sigmas[k].a[ax]; });
        pDot[ax] = derivative([&](std::size_t k) { return sigmas[k].p[ax]; });
    }
    std::vector<double> gDot = derivative([&](std::size_t k) { return sigmas[k].gamma; });
    std::vector<double> muDot = derivative([&](std::size_t k) { return sigmas[k].mu; });

    std::vector<AlphaCoefficients> out(n, AlphaCoefficients(d));
    for (std::size_t k = 0; k < n; ++k) {
        const ClassicalState& s = sigmas[k];
        Vec da(d);
        for (int ax = 0; ax < d; ++ax) {
            da[ax] = aDot[ax][k];
            out[k].alphaTrans[ax] = aDot[ax][k] - 2.0 * s.p[ax];
            out[k].alphaBoost[ax] = -pDot[ax][k] - pot.gradV(s.a)[ax];
        }
        out[k].alphaGauge =
            s.mu - s.p.squaredNorm() + da.dot(s.p) - pot.evalV(s.a) - gDot[k];
        out[k].alphaScale = -muDot[k];
    }
    return out;
}

std::vector<std::pair<double, ClassicalState>> rk4Integrate(const ClassicalRHS& rhs,
                                                            const ClassicalState& s0, double T,
                                                            double dt) {
    if (dt <= 0.0) throw ConfigError("rk4Integrate: dt must be positive");
    const long nSteps = std::lround(std::abs(T) / dt);
    const double sdt = (T >= 0.0) ? dt : -dt;
    std::vector<std::pair<double, ClassicalState>> out;
    out.reserve(nSteps + 1);
    ClassicalState s = s0;
    double t = 0.0;
    out.emplace_back(t, s);
    for (long k = 0; k < nSteps; ++k) {
        ClassicalState k1 = rhs(t, s);
        ClassicalState k2 = rhs(t + 0.5 * sdt, s + 0.5 * sdt * k1);
        ClassicalState k3 = rhs(t + 0.5 * sdt, s + 0.5 * sdt * k2);
        ClassicalState k4 = rhs(t + sdt, s + sdt * k3);
        s = s + (sdt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += sdt;
        if (!s.a.allFinite() || !s.p.allFinite() || !std::isfinite(s.gamma) ||
            !std::isfinite(s.mu))
            throw NonConvergence("rk4Integrate: state became non-finite");
        out.emplace_back(t, s);
    }
    return out;
}

double perturbationResidual(const TrackedPoint& first, const TrackedPoint& second,
                            const ClassicalState& sigmaDot, const ProfileFamily& family,
                            const Potential& pot, const Nonlinearity& nl) {
    const double h = second.t - first.t;
    if (h <= 0.0) throw ConfigError("perturbationResidual: states must be time-ordered");
    const int d = first.dec.w.grid.d;

    Field wDot = (1.0 / h) * (second.dec.w - first.dec.w);
    Field wMid = 0.5 * (first.dec.w + second.dec.w);
    ModulationState mid;
    mid.a = 0.5 * (first.dec.sigma.a + second.dec.sigma.a);
    mid.p = 0.5 * (first.dec.sigma.p + second.dec.sigma.p);
    mid.mu = 0.5 * (first.dec.sigma.mu + second.dec.sigma.mu);
    mid.gamma = first.dec.sigma.gamma;

    SolitonProfile prof = family.at(mid.mu);
    AlphaCoefficients alpha(d);
    alpha.alphaTrans = sigmaDot.a - 2.0 * mid.p;
    alpha.alphaBoost = -sigmaDot.p - pot.gradV(mid.a);
    alpha.alphaGauge = mid.mu - mid.p.squaredNorm() + sigmaDot.a.dot(mid.p) -
                       pot.evalV(mid.a) - sigmaDot.gamma;
    alpha.alphaScale = -sigmaDot.mu;

    Field u = prof.eta + wMid;
    Field rv = rvField(pot, u.grid, mid.a);
    Field rhsField = linearizedApply(nl, prof.eta, mid.mu, wMid);
    rhsField = rhsField + remainderN(nl, prof.eta, wMid) + mulPointwise(rv, u);
    const Complex iu(0.0, 1.0);
    // i (alpha . K)(u): trans gives i alpha_t d_x u, boost i alpha_b (i x u),
    // gauge i alpha_g (i u); plus the -i mu_dot d_mu eta term.
    for (int ax = 0; ax < d; ++ax) {
        rhsField = rhsField + Complex(0.0, alpha.alphaTrans[ax]) * spectralDerive(u, ax, 1);
        rhsField = rhsField + (-alpha.alphaBoost[ax]) * mulCoord(u, ax);
    }
    rhsField = rhsField + (-alpha.alphaGauge) * u;
    rhsField = rhsField - (iu * sigmaDot.mu) * prof.dMuEta;

    Field residual = iu * wDot - rhsField;
    return l2Norm(residual);
}

} // namespace solwave
