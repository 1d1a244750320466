#pragma once

#include "solwave/grid.hpp"

namespace solwave {

// Confining external potential V(x) = W(epsV x) with derived assumption
// constants. Built-in families only; derivatives are analytic.
struct Potential {
    enum class Family { Zero, Quadratic, EvenQuartic };

    Family family = Family::Zero;
    double epsV = 1.0;
    double r = 2.0;  // growth rate

    // Quadratic: W(y) = y.A y + v.y + c.
    Eigen::MatrixXd A;
    Vec v;
    double c = 0.0;

    // EvenQuartic: W(y) = q4 |y|^4 + q2 |y|^2.
    double q4 = 0.0;
    double q2 = 0.0;

    // Assumption constants derived from the coefficients.
    double CV = 0.0;
    double rho1 = 0.0;
    double cV = 0.0;
    double cL = 1.0;

    static Potential zero(int d);
    static Potential quadratic(const Eigen::MatrixXd& A, const Vec& v, double c, double epsV);
    static Potential harmonic1D(double epsV);  // W(y) = y^2
    static Potential evenQuartic(int d, double q4, double q2, double epsV);

    int dim() const { return static_cast<int>(v.size()); }

    double evalV(const Vec& x) const;
    Vec gradV(const Vec& x) const;
    Eigen::MatrixXd hessV(const Vec& x) const;

    // R_V(x) = V(x+a) - V(a) - grad V(a).x  (Taylor remainder around a).
    double evalRV(const Vec& x, const Vec& a) const;
    Vec gradARV(const Vec& x, const Vec& a) const;   // d/da of R_V at fixed x
    Vec gradXRV(const Vec& x, const Vec& a) const;   // d/dx of R_V

    bool isZero() const { return family == Family::Zero; }
};

// Grid samplers (box coordinate, not periodized).
Field potentialField(const Potential& pot, const GridSpec& g);
Field rvField(const Potential& pot, const GridSpec& g, const Vec& a);
std::vector<Field> gradARVFields(const Potential& pot, const GridSpec& g, const Vec& a);
std::vector<Field> gradXRVFields(const Potential& pot, const GridSpec& g, const Vec& a);

// Lower-bound constant C0 for the remainder inequality
// R_V >= C0 rho1 epsV^2 |x|^2 <epsV x>^{r-2}; caseId 1 needs r >= 2,
// caseId 2 needs r <= 2 with epsV|a| <= Ca, caseId 0 picks automatically.
double lowerBoundC0(double r, double Ca, int caseId);
double lowerBoundMargin(const Potential& pot, const Vec& x, const Vec& a,
                        double Ca, int caseId = 0);

struct UpperBoundMargins {
    double gradA = 0.0;  // C epsV^3 |x|^2 <epsV x>^{r-2} - max_k |d_{a_k} R_V|
    double rv = 0.0;     // C1 (1 + epsV^2 |x|^2 <epsV x>^{r-2}) - R_V
};
UpperBoundMargins upperBoundMargins(const Potential& pot, const Vec& x, const Vec& a, double Ca);

struct ScalarLemmaMargins {
    double maxminLow = 0.0;
    double maxminHigh = 0.0;
    double convexity = 0.0;
    double normEquivLow = 0.0;
    double normEquivHigh = 0.0;
};
// Margins of the scalar inequalities used by the remainder bounds:
// bracketing of (1+y^2)^{b/2}/(1+|y|^b), the convexity bound
// |1+y|^r - 1 - ry >= 2^{2-r}|y|^r (r >= 2), and the norm-equivalence
// bracket of (1 + y^2 <y>^{r-2}) / <y>^r.
ScalarLemmaMargins scalarLemmaMargins(double y, double b, double r);

// Extremal constant of the norm-equivalence bracket (0 at r = 2).
double normEquivConstant(double r);

// V_eff(a) = |eta|^{-2} int V(a+x) eta^2 d^dx and its a-gradient.
double effectivePotential(const Potential& pot, const Field& eta, const Vec& a);
Vec gradEffectivePotential(const Potential& pot, const Field& eta, const Vec& a);

// 32-point Gauss-Legendre evaluation of the Taylor-remainder integral
// int_0^1 (1-theta) x.Hess V(a + theta x).x dtheta (test oracle for evalRV).
double rvByQuadrature(const Potential& pot, const Vec& x, const Vec& a);

} // namespace solwave
