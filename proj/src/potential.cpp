#include "solwave/potential.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace solwave {

namespace {

double angleBracketSq(double t) { return 1.0 + t * t; }

Vec gridPoint(const GridSpec& g, std::size_t idx) {
    int sub[2];
    g.unflatten(idx, sub);
    Vec x(g.d);
    for (int ax = 0; ax < g.d; ++ax) x[ax] = g.axisCoord(sub[ax]);
    return x;
}

} // namespace

Potential Potential::zero(int d) {
    Potential p;
    p.family = Family::Zero;
    p.epsV = 1.0;
    p.r = 2.0;
    p.A = Eigen::MatrixXd::Zero(d, d);
    p.v = Vec::Zero(d);
    return p;
}

Potential Potential::quadratic(const Eigen::MatrixXd& A, const Vec& v, double c, double epsV) {
    if (A.rows() != A.cols() || A.rows() != v.size())
        throw ConfigError("potential: A and v dimensions disagree");
    if (!A.isApprox(A.transpose(), 1e-12)) throw ConfigError("potential: A must be symmetric");
    if (epsV <= 0.0) throw ConfigError("potential: epsV must be positive");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (lmin < -1e-14) throw ConfigError("potential: A must be positive semidefinite");
    const double vnorm = v.norm();
    if (c < 0.0) throw ConfigError("potential: need min W >= 0");
    if (vnorm > 0.0 && lmin > 0.0) {
        const double wmin = c - 0.25 * v.dot(A.ldlt().solve(v)) * 1.0;
        if (wmin < -1e-12) throw ConfigError("potential: need min W >= 0");
    }

    Potential p;
    p.family = Family::Quadratic;
    p.epsV = epsV;
    p.r = 2.0;
    p.A = A;
    p.v = v;
    p.c = c;
    p.rho1 = 2.0 * lmin;
    p.CV = std::max({lmax + vnorm + c, 2.0 * lmax + vnorm,
                     2.0 * A.cwiseAbs().maxCoeff()});
    if (vnorm == 0.0) {
        p.cV = lmin;
        p.cL = 1.0;
    } else {
        p.cV = 0.5 * lmin;
        p.cL = (lmin > 0.0) ? std::max(1.0, 2.0 * vnorm / lmin) : 1.0;
    }
    return p;
}

Potential Potential::harmonic1D(double epsV) {
    Eigen::MatrixXd A(1, 1);
    A(0, 0) = 1.0;
    return quadratic(A, Vec::Zero(1), 0.0, epsV);
}

Potential Potential::evenQuartic(int d, double q4, double q2, double epsV) {
    if (q4 <= 0.0 || q2 <= 0.0) throw ConfigError("potential: quartic needs q4, q2 > 0");
    if (epsV <= 0.0) throw ConfigError("potential: epsV must be positive");
    Potential p;
    p.family = Family::EvenQuartic;
    p.epsV = epsV;
    p.r = 4.0;
    p.A = Eigen::MatrixXd::Zero(d, d);
    p.v = Vec::Zero(d);
    p.q4 = q4;
    p.q2 = q2;
    p.rho1 = std::min(2.0 * q2, 4.0 * q4);
    p.CV = std::max({12.0 * q4 + 2.0 * q2, 24.0 * q4, q2});
    p.cV = q4;
    p.cL = 1.0;
    return p;
}

double Potential::evalV(const Vec& x) const {
    switch (family) {
        case Family::Zero:
            return 0.0;
        case Family::Quadratic: {
            const Vec y = epsV * x;
            return y.dot(A * y) + v.dot(y) + c;
        }
        case Family::EvenQuartic: {
            const double y2 = epsV * epsV * x.squaredNorm();
            return q4 * y2 * y2 + q2 * y2;
        }
    }
    return 0.0;
}

Vec Potential::gradV(const Vec& x) const {
    switch (family) {
        case Family::Zero:
            return Vec::Zero(x.size());
        case Family::Quadratic: {
            const Vec y = epsV * x;
            return epsV * (2.0 * A * y + v);
        }
        case Family::EvenQuartic: {
            const Vec y = epsV * x;
            const double y2 = y.squaredNorm();
            return epsV * ((4.0 * q4 * y2 + 2.0 * q2) * y);
        }
    }
    return Vec::Zero(x.size());
}

Eigen::MatrixXd Potential::hessV(const Vec& x) const {
    const int d = static_cast<int>(x.size());
    switch (family) {
        case Family::Zero:
            return Eigen::MatrixXd::Zero(d, d);
        case Family::Quadratic:
            return 2.0 * epsV * epsV * A;
        case Family::EvenQuartic: {
            const Vec y = epsV * x;
            const double y2 = y.squaredNorm();
            Eigen::MatrixXd H = (4.0 * q4 * y2 + 2.0 * q2) * Eigen::MatrixXd::Identity(d, d);
            H += 8.0 * q4 * y * y.transpose();
            return epsV * epsV * H;
        }
    }
    return Eigen::MatrixXd::Zero(d, d);
}

double Potential::evalRV(const Vec& x, const Vec& a) const {
    return evalV(x + a) - evalV(a) - gradV(a).dot(x);
}

Vec Potential::gradARV(const Vec& x, const Vec& a) const {
    return gradV(x + a) - gradV(a) - hessV(a) * x;
}

Vec Potential::gradXRV(const Vec& x, const Vec& a) const {
    return gradV(x + a) - gradV(a);
}

Field potentialField(const Potential& pot, const GridSpec& g) {
    Field out(g);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.v[i] = Complex(pot.evalV(gridPoint(g, i)), 0.0);
    return out;
}

Field rvField(const Potential& pot, const GridSpec& g, const Vec& a) {
    Field out(g);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.v[i] = Complex(pot.evalRV(gridPoint(g, i), a), 0.0);
    return out;
}

std::vector<Field> gradARVFields(const Potential& pot, const GridSpec& g, const Vec& a) {
    std::vector<Field> out(g.d, Field(g));
    for (std::size_t i = 0; i < out[0].size(); ++i) {
        const Vec gr = pot.gradARV(gridPoint(g, i), a);
        for (int ax = 0; ax < g.d; ++ax) out[ax].v[i] = Complex(gr[ax], 0.0);
    }
    return out;
}

std::vector<Field> gradXRVFields(const Potential& pot, const GridSpec& g, const Vec& a) {
    std::vector<Field> out(g.d, Field(g));
    for (std::size_t i = 0; i < out[0].size(); ++i) {
        const Vec gr = pot.gradXRV(gridPoint(g, i), a);
        for (int ax = 0; ax < g.d; ++ax) out[ax].v[i] = Complex(gr[ax], 0.0);
    }
    return out;
}

double lowerBoundC0(double r, double Ca, int caseId) {
    int useCase = caseId;
    if (useCase == 0) useCase = (r >= 2.0) ? 1 : 2;
    if (useCase == 1) {
        if (r < 2.0) throw HypothesisViolation("lower bound case (i) needs r >= 2");
        return 1.0 / (std::pow(2.0, r - 2.0 + std::max(0.0, (r - 4.0) / 2.0)) * r * (r - 1.0));
    }
    if (r > 2.0) throw HypothesisViolation("lower bound case (ii) needs r <= 2");
    return 1.0 / (2.0 * std::pow(2.0 * (1.0 + Ca * Ca), (2.0 - r) / 2.0));
}

double lowerBoundMargin(const Potential& pot, const Vec& x, const Vec& a,
                        double Ca, int caseId) {
    if (pot.rho1 <= 0.0) throw HypothesisViolation("lower bound needs rho1 > 0");
    const double r = pot.r;
    if (r < 2.0 || caseId == 2) {
        if (pot.epsV * a.norm() > Ca)
            throw HypothesisViolation("lower bound case (ii) needs epsV|a| <= Ca");
    }
    const double C0 = lowerBoundC0(r, Ca, caseId);
    const double ex2 = pot.epsV * pot.epsV * x.squaredNorm();
    const double bound = C0 * pot.rho1 * ex2 * std::pow(angleBracketSq(std::sqrt(ex2)), (r - 2.0) / 2.0);
    return pot.evalRV(x, a) - bound;
}

UpperBoundMargins upperBoundMargins(const Potential& pot, const Vec& x, const Vec& a, double Ca) {
    if (pot.isZero()) throw HypothesisViolation("upper bounds need a confining family");
    if (pot.epsV * a.norm() > Ca)
        throw HypothesisViolation("upper bounds need epsV|a| <= Ca");
    const double r = pot.r;
    const double d = static_cast<double>(x.size());
    const double eps = pot.epsV;
    const double ex = eps * x.norm();
    const double brackPow = std::pow(angleBracketSq(ex), (r - 2.0) / 2.0);

    double Cgrad;
    if (r >= 2.0)
        Cgrad = 0.5 * pot.CV * d * std::pow(2.0 * (1.0 + Ca * Ca), std::max(r - 3.0, 0.0) / 2.0);
    else
        Cgrad = pot.CV * d * (6.0 * std::sqrt(2.0) + std::log(1.0 + Ca));

    UpperBoundMargins m;
    const double gradBound = Cgrad * eps * eps * eps * x.squaredNorm() * brackPow;
    m.gradA = gradBound - pot.gradARV(x, a).cwiseAbs().maxCoeff();

    const double C1 = 2.0 * pot.CV * std::pow(2.0 + 2.0 * Ca * Ca, (r - 1.0) / 2.0);
    m.rv = C1 * (1.0 + ex * ex * brackPow) - pot.evalRV(x, a);
    return m;
}

double normEquivConstant(double r) {
    if (r <= 0.0) throw HypothesisViolation("norm equivalence needs r > 0");
    if (r == 2.0) return 0.0;
    return (2.0 - r) / r * std::pow(2.0 / r, 2.0 / (r - 2.0));
}

ScalarLemmaMargins scalarLemmaMargins(double y, double b, double r) {
    if (b < 0.0) throw HypothesisViolation("maxmin bracket needs b >= 0");
    if (r < 2.0) throw HypothesisViolation("convexity bound needs r >= 2");
    ScalarLemmaMargins m;

    const double ratio = std::pow(1.0 + y * y, b / 2.0) / (1.0 + std::pow(std::abs(y), b));
    m.maxminLow = ratio - std::pow(2.0, -std::max(0.0, (2.0 - b) / 2.0));
    m.maxminHigh = std::pow(2.0, std::max(0.0, (b - 2.0) / 2.0)) - ratio;

    m.convexity = std::pow(std::abs(1.0 + y), r) - 1.0 - r * y
                  - std::pow(2.0, 2.0 - r) * std::pow(std::abs(y), r);

    const double br = angleBracketSq(y);
    const double ratio2 = (1.0 + y * y * std::pow(br, (r - 2.0) / 2.0)) / std::pow(br, r / 2.0);
    const double cr = normEquivConstant(r);
    m.normEquivLow = ratio2 - (1.0 + std::min(0.0, cr));
    m.normEquivHigh = (1.0 + std::max(0.0, cr)) - ratio2;
    return m;
}

double effectivePotential(const Potential& pot, const Field& eta, const Vec& a) {
    const GridSpec& g = eta.grid;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double dens = std::norm(eta.v[i]);
        num += pot.evalV(gridPoint(g, i) + a) * dens;
        den += dens;
    }
    if (den <= 0.0) throw ConfigError("effectivePotential: zero profile");
    return num / den;
}

Vec gradEffectivePotential(const Potential& pot, const Field& eta, const Vec& a) {
    const GridSpec& g = eta.grid;
    Vec num = Vec::Zero(g.d);
    double den = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double dens = std::norm(eta.v[i]);
        num += pot.gradV(gridPoint(g, i) + a) * dens;
        den += dens;
    }
    return num / den;
}

double rvByQuadrature(const Potential& pot, const Vec& x, const Vec& a) {
    // 32-point Gauss-Legendre on [0, 1]; nodes by Newton on P_32.
    constexpr int n = 32;
    static double node[n], weight[n];
    static bool init = false;
    if (!init) {
        for (int i = 0; i < n / 2; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = n * (t * p1 - p0) / (t * t - 1.0);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-15) break;
            }
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double w = 2.0 / ((1.0 - t * t) * dp * dp);
            node[i] = t;
            weight[i] = w;
            node[n - 1 - i] = -t;
            weight[n - 1 - i] = w;
        }
        init = true;
    }
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double theta = 0.5 * (node[i] + 1.0);
        const double w = 0.5 * weight[i];
        sum += w * (1.0 - theta) * x.dot(pot.hessV(a + theta * x) * x);
    }
    return sum;
}

} // namespace solwave
