#include "solwave/diagnostics.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace solwave {

double hamiltonian(const Field& psi, const Potential& pot, const Nonlinearity& nl) {
    double kin = 0.0;
    for (int ax = 0; ax < psi.grid.d; ++ax) {
        Field du = spectralDerive(psi, ax, 1);
        kin += innerRe(du, du);
    }
    Field vf = potentialField(pot, psi.grid);
    double pe = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) pe += vf.v[i].real() * std::norm(psi.v[i]);
    pe *= quadratureWeight(psi.grid);
    return 0.5 * (kin + pe) - evalFunctional(nl, psi);
}

MassMomentum massAndMomentum(const Field& psi) {
    MassMomentum out;
    out.mass = 0.5 * innerRe(psi, psi);
    out.momentum = Vec::Zero(psi.grid.d);
    for (int ax = 0; ax < psi.grid.d; ++ax) {
        Field du = spectralDerive(psi, ax, 1);
        out.momentum[ax] = 0.5 * symForm(du, psi);  // (1/2) Im int conj(psi) d_ax psi
    }
    return out;
}

double energyEmu(const Field& u, double mu, const Nonlinearity& nl) {
    double kin = 0.0;
    for (int ax = 0; ax < u.grid.d; ++ax) {
        Field du = spectralDerive(u, ax, 1);
        kin += innerRe(du, du);
    }
    return 0.5 * kin - evalFunctional(nl, u) + mu * 0.5 * innerRe(u, u);
}

double kSigma(const Field& psi, const ModulationState& sigma, const Potential& pot,
              const Nonlinearity& nl) {
    MassMomentum mm = massAndMomentum(psi);
    double value = hamiltonian(psi, pot, nl);
    value += (sigma.p.squaredNorm() + sigma.mu) * mm.mass;
    value -= 2.0 * sigma.p.dot(mm.momentum);

    const double va = pot.evalV(sigma.a);
    const Vec gva = pot.gradV(sigma.a);
    const GridSpec& g = psi.grid;
    int sub[2];
    double lin = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        g.unflatten(i, sub);
        double term = va;
        for (int ax = 0; ax < g.d; ++ax)
            term += gva[ax] * (g.axisCoord(sub[ax]) - sigma.a[ax]);
        lin += term * std::norm(psi.v[i]);
    }
    value -= 0.5 * quadratureWeight(g) * lin;
    return value;
}

double lyapunov(const SolitonProfile& prof, const Field& w, const Vec& a,
                const Potential& pot, const Nonlinearity& nl) {
    Field u = prof.eta + w;
    Field rv = rvField(pot, prof.grid, a);
    const double quadU = innerRe(mulPointwise(rv, u), u);
    const double quadEta = innerRe(mulPointwise(rv, prof.eta), prof.eta);
    return energyEmu(u, prof.mu, nl) + 0.5 * quadU - energyEmu(prof.eta, prof.mu, nl) -
           0.5 * quadEta;
}

double lyapunovRate(const SolitonProfile& prof, const Field& w, const ModulationState& sigma,
                    const AlphaCoefficients& alpha, double muDot, const Potential& pot) {
    const GridSpec& g = prof.grid;
    const int d = g.d;
    std::vector<Field> dArv = gradARVFields(pot, g, sigma.a);
    const Eigen::MatrixXd hess = pot.hessV(sigma.a);

    double rate = 0.0;
    for (int k = 0; k < d; ++k)
        rate += sigma.p[k] * innerRe(mulPointwise(dArv[k], w), w);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
            rate -= 0.5 * alpha.alphaTrans[j] * hess(j, k) * innerRe(mulCoord(w, k), w);
    for (int k = 0; k < d; ++k) {
        Field dw = spectralDerive(w, k, 1);
        rate += alpha.alphaBoost[k] * innerRe(Complex(0.0, 1.0) * w, dw);
    }
    for (int k = 0; k < d; ++k) {
        rate += 2.0 * sigma.p[k] * innerRe(mulPointwise(dArv[k], prof.eta), w);
        rate -= 0.5 * alpha.alphaTrans[k] * innerRe(mulPointwise(dArv[k], prof.eta), prof.eta);
    }
    rate += 0.5 * muDot * innerRe(w, w);
    Field rv = rvField(pot, g, sigma.a);
    rate -= muDot * innerRe(mulPointwise(rv, prof.eta), prof.dMuEta);
    return rate;
}

namespace {

// Dense symmetric matrices of the quadratic forms <L_block u, v> and
// <u, v>_H1 on real fields, built by operator application.
void denseForms(const SolitonProfile& prof, const Nonlinearity& nl, int block,
                Eigen::MatrixXd& A, Eigen::MatrixXd& B) {
    const GridSpec& g = prof.grid;
    const std::size_t n = g.size();
    if (n > 4096) throw ConfigError("coercivityEstimate: grid too large for dense solve");
    A.resize(n, n);
    B.resize(n, n);
    Field unit(g);
    const double quad = quadratureWeight(g);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(unit.v.begin(), unit.v.end(), Complex(0.0, 0.0));
        unit.v[j] = Complex(1.0, 0.0);
        Field lcol = linearBlockApply(nl, prof.eta, prof.mu, unit, block);
        Field hcol = laplacian(unit);
        for (std::size_t i = 0; i < n; ++i) {
            A(i, j) = quad * lcol.v[i].real();
            B(i, j) = quad * ((i == j ? 1.0 : 0.0) - hcol.v[i].real());
        }
    }
    A = 0.5 * (A + A.transpose()).eval();
    B = 0.5 * (B + B.transpose()).eval();
}

double smallestQuotient(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                        const std::vector<Eigen::VectorXd>& constraints, double quad) {
    if (constraints.empty()) {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
        if (es.info() != Eigen::Success)
            throw NonConvergence("coercivityEstimate: eigensolver failed");
        return es.eigenvalues()(0);
    }
    const auto n = A.rows();
    const auto m = static_cast<Eigen::Index>(constraints.size());
    Eigen::MatrixXd C(n, m);
    for (Eigen::Index j = 0; j < m; ++j) C.col(j) = quad * constraints[j];
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(C);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::MatrixXd Z = Q.rightCols(n - m);  // basis of the constraint null space
    Eigen::MatrixXd Ar = Z.transpose() * A * Z;
    Eigen::MatrixXd Br = Z.transpose() * B * Z;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (Ar + Ar.transpose()), 0.5 * (Br + Br.transpose()));
    if (es.info() != Eigen::Success)
        throw NonConvergence("coercivityEstimate: eigensolver failed");
    return es.eigenvalues()(0);
}

Eigen::VectorXd toVector(const Field& f) {
    Eigen::VectorXd v(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) v[i] = f.v[i].real();
    return v;
}

} // namespace

CoercivityResult coercivityEstimate(const SolitonProfile& prof, const Nonlinearity& nl,
                                    bool projected) {
    const GridSpec& g = prof.grid;
    const double quad = quadratureWeight(g);

    Eigen::MatrixXd A1, B1, A2, B2;
    denseForms(prof, nl, 1, A1, B1);
    denseForms(prof, nl, 2, A2, B2);

    std::vector<Eigen::VectorXd> c1, c2;
    if (projected) {
        c1.push_back(toVector(prof.eta));
        for (int k = 0; k < g.d; ++k) c1.push_back(toVector(mulCoord(prof.eta, k)));
        for (int k = 0; k < g.d; ++k) c2.push_back(toVector(spectralDerive(prof.eta, k, 1)));
        c2.push_back(toVector(prof.dMuEta));
    }

    CoercivityResult out;
    out.block1 = smallestQuotient(A1, B1, c1, quad);
    out.block2 = smallestQuotient(A2, B2, c2, quad);
    out.rho2 = std::min(out.block1, out.block2);
    return out;
}

} // namespace solwave
