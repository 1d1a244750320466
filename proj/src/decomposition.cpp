#include "solwave/decomposition.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace solwave {

namespace {

// Moving frame u = S^{-1} psi split so that only the a-dependent translation
// needs an FFT; p, gamma, mu perturbations reuse the translated field.
Field phaseOnly(const Field& translated, const Vec& p, double gamma) {
    Field out = translated;
    const GridSpec& g = translated.grid;
    int sub[2];
    for (std::size_t i = 0; i < out.size(); ++i) {
        g.unflatten(i, sub);
        double phase = -gamma;
        for (int ax = 0; ax < g.d; ++ax) phase -= p[ax] * g.axisCoord(sub[ax]);
        out.v[i] *= std::polar(1.0, phase);
    }
    return out;
}

Vec residualsOf(const Field& translated, const Vec& p, double gamma,
                const SolitonProfile& prof) {
    Field u = phaseOnly(translated, p, gamma);
    Field w = u - prof.eta;
    return pairingResiduals(w, prof);
}

// Leading pairing Jacobian at w = 0 (rows follow pairingResiduals, columns
// a, p, gamma, mu): the +-m(mu), +-m'(mu) pattern.
Eigen::MatrixXd leadingJacobian(const SolitonProfile& prof, const Vec& p) {
    const int d = prof.grid.d;
    const int n = 2 * d + 2;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    const double m = prof.mass, mp = prof.massSlope;
    J(0, 2 * d + 1) = -mp;
    for (int k = 0; k < d; ++k) J(1 + k, k) = -m;
    for (int k = 0; k < d; ++k) J(1 + d + k, d + k) = m;
    for (int k = 0; k < d; ++k) J(2 * d + 1, k) = p[k] * mp;
    J(2 * d + 1, 2 * d) = -mp;
    return J;
}

} // namespace

Vec pairingResiduals(const Field& w, const SolitonProfile& prof) {
    const int d = prof.grid.d;
    Vec res(2 * d + 2);
    Field re = realPart(w);
    Field im = imagPart(w);
    res[0] = innerRe(re, prof.eta);
    for (int k = 0; k < d; ++k) res[1 + k] = innerRe(re, mulCoord(prof.eta, k));
    for (int k = 0; k < d; ++k) res[1 + d + k] = innerRe(im, spectralDerive(prof.eta, k, 1));
    res[2 * d + 1] = innerRe(im, prof.dMuEta);
    return res;
}

Field projectSkewOrthogonal(const Field& w, const SolitonProfile& prof) {
    Field out = w;
    const int d = prof.grid.d;
    auto removeRe = [&](const Field& dir) {
        const double c = innerRe(realPart(out), dir) / innerRe(dir, dir);
        for (std::size_t i = 0; i < out.size(); ++i)
            out.v[i] -= Complex(c * dir.v[i].real(), 0.0);
    };
    auto removeIm = [&](const Field& dir) {
        const double c = innerRe(imagPart(out), dir) / innerRe(dir, dir);
        for (std::size_t i = 0; i < out.size(); ++i)
            out.v[i] -= Complex(0.0, c * dir.v[i].real());
    };
    // The Re-part directions {eta, x_k eta} are mutually L2-orthogonal by
    // parity, as are the Im-part pairs {d_k eta} among themselves; d_mu eta
    // is even and orthogonal to the odd d_k eta, so single passes suffice.
    removeRe(prof.eta);
    for (int k = 0; k < d; ++k) removeRe(mulCoord(prof.eta, k));
    for (int k = 0; k < d; ++k) removeIm(spectralDerive(prof.eta, k, 1));
    removeIm(prof.dMuEta);
    return out;
}

ModulationState initialGuess(const Field& psi, const ProfileFamily& family) {
    const double mass = 0.5 * innerRe(psi, psi);
    if (mass <= 0.0) throw ConfigError("initialGuess: zero field");
    const int d = psi.grid.d;

    Vec a = centroid(psi);
    Vec p(d);
    for (int ax = 0; ax < d; ++ax) {
        Field du = spectralDerive(psi, ax, 1);
        p[ax] = 0.5 * symForm(du, psi) / mass;  // P_k / N
    }
    const double mu = family.invertMass(mass);

    SolitonProfile prof = family.at(mu);
    Field phi = applySymmetry(SymmetryParams(a, p, 0.0), prof.eta);
    const double gamma = std::atan2(symForm(psi, phi), innerRe(psi, phi));
    return ModulationState(a, p, gamma, mu);
}

DecompositionResult decompose(const Field& psi, const ProfileFamily& family,
                              const ModulationState& guess, const DecomposeOptions& opts) {
    const int d = psi.grid.d;
    const int n = 2 * d + 2;
    auto [muLo, muHi] = family.admissibleRange();

    ModulationState sigma = guess;
    sigma.mu = std::min(std::max(sigma.mu, muLo), muHi);

    Field translated = translate(psi, -sigma.a);
    SolitonProfile prof = family.at(sigma.mu);
    Vec G = residualsOf(translated, sigma.p, sigma.gamma, prof);

    const double etaSq = innerRe(prof.eta, prof.eta);
    const double tol = opts.tol * etaSq;
    const double delta = opts.deltaFraction * std::sqrt(etaSq);
    const double h = opts.fdStep;

    int iter = 0;
    for (; iter < opts.maxIterations && G.cwiseAbs().maxCoeff() > tol; ++iter) {
        Eigen::MatrixXd J(n, n);
        for (int ax = 0; ax < d; ++ax) {
            Vec aPert = sigma.a;
            aPert[ax] += h;
            Field trPert = translate(psi, -aPert);
            J.col(ax) = (residualsOf(trPert, sigma.p, sigma.gamma, prof) - G) / h;
        }
        for (int ax = 0; ax < d; ++ax) {
            Vec pPert = sigma.p;
            pPert[ax] += h;
            J.col(d + ax) = (residualsOf(translated, pPert, sigma.gamma, prof) - G) / h;
        }
        J.col(2 * d) = (residualsOf(translated, sigma.p, sigma.gamma + h, prof) - G) / h;
        {
            SolitonProfile profPert = family.at(sigma.mu + h);
            J.col(2 * d + 1) = (residualsOf(translated, sigma.p, sigma.gamma, profPert) - G) / h;
        }

        Vec step;
        bool ok = J.allFinite();
        if (ok) {
            Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
            ok = lu.isInvertible();
            if (ok) step = lu.solve(G);
        }
        if (!ok) step = leadingJacobian(prof, sigma.p).partialPivLu().solve(G);

        for (int ax = 0; ax < d; ++ax) sigma.a[ax] -= step[ax];
        for (int ax = 0; ax < d; ++ax) sigma.p[ax] -= step[d + ax];
        sigma.gamma = wrapAngle(sigma.gamma - step[2 * d]);
        const double muNew = sigma.mu - step[2 * d + 1];
        if (muNew < muLo - 1e-9 || muNew > muHi + 1e-9)
            throw OutOfTube("decompose: mu left the admissible interval");
        sigma.mu = std::min(std::max(muNew, muLo), muHi);

        translated = translate(psi, -sigma.a);
        prof = family.at(sigma.mu);
        G = residualsOf(translated, sigma.p, sigma.gamma, prof);

        Field u = phaseOnly(translated, sigma.p, sigma.gamma);
        if (l2Norm(u - prof.eta) > delta)
            throw OutOfTube("decompose: perturbation exceeded the tube radius");
    }
    if (G.cwiseAbs().maxCoeff() > tol)
        throw MaxIterations("decompose: Newton did not reach tolerance");

    DecompositionResult result;
    result.sigma = sigma;
    Field u = phaseOnly(translated, sigma.p, sigma.gamma);
    result.w = u - prof.eta;
    result.orthoResiduals = G;
    result.newtonIterations = iter;
    result.wNorms = norms(result.w, opts.epsV, opts.r);
    return result;
}

Tracker::Tracker(const ProfileFamily& family, const DecomposeOptions& opts)
    : family_(family), opts_(opts) {}

TrackedPoint Tracker::feed(const EvolutionState& state) {
    ModulationState seed = started_ ? last_ : initialGuess(state.psi, family_);
    TrackedPoint pt;
    pt.t = state.t;
    pt.dec = decompose(state.psi, family_, seed, opts_);

    const double wrapped = pt.dec.sigma.gamma;
    if (!started_) {
        pt.gammaUnwrapped = wrapped;
    } else {
        // nearest 2*pi branch keeps the reported series continuous
        pt.gammaUnwrapped =
            wrapped + 2.0 * M_PI * std::round((lastUnwrapped_ - wrapped) / (2.0 * M_PI));
    }
    last_ = pt.dec.sigma;
    lastUnwrapped_ = pt.gammaUnwrapped;
    started_ = true;
    return pt;
}

TrackedSeries trackSeries(const std::vector<EvolutionState>& states,
                          const ProfileFamily& family, const DecomposeOptions& opts) {
    TrackedSeries out;
    Tracker tracker(family, opts);
    for (std::size_t k = 0; k < states.size(); ++k) {
        try {
            out.points.push_back(tracker.feed(states[k]));
        } catch (const OutOfTube&) {
            out.truncatedAt = k;
            break;
        }
    }
    return out;
}

} // namespace solwave
