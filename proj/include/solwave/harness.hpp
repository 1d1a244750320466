#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "solwave/diagnostics.hpp"
#include "solwave/exactfamily.hpp"

namespace solwave {

struct ExperimentConfig {
    GridSpec grid{1, 512, 40.0};
    Nonlinearity nl = Nonlinearity::cubic(1.0);
    Potential pot = Potential::zero(1);

    ModulationState sigma0;
    enum class Perturbation { None, SkewOrthogonalNoise };
    Perturbation perturbation = Perturbation::None;
    double noiseAmplitude = 0.0;  // eps0
    std::uint64_t seed = 1;

    double dt = 1e-3;
    double T = 10.0;
    int outputStride = 10;
    bool dealias = false;

    double decomposeTol = 1e-12;
    double groundStateTol = 1e-10;
    double muMin = 0.5;
    double muMax = 2.0;

    double epsilon() const { return (pot.isZero() ? 0.0 : pot.epsV) + noiseAmplitude; }
    double epsH() const { return 0.5 * (sigma0.p.squaredNorm() + pot.evalV(sigma0.a)); }
    double dtOut() const { return dt * outputStride; }
};

// Flat dotted-key config text (lines "key = value", '#' comments).
ExperimentConfig parseConfig(const std::string& text);
ExperimentConfig parseConfigFile(const std::string& path);
std::map<std::string, std::string> configToKeyValues(const ExperimentConfig& cfg);
std::string configToText(const ExperimentConfig& cfg);

// Band-limited seeded noise under a decaying envelope, projected onto the
// skew-orthogonal complement at the initial profile and normalized to unit
// energy norm.
Field skewOrthogonalNoise(const SolitonProfile& prof, std::uint64_t seed, double epsV, double r);

std::unique_ptr<ProfileFamily> makeProfileFamily(const ExperimentConfig& cfg);
Field buildInitialCondition(const ExperimentConfig& cfg, const ProfileFamily& family);

struct RunRow {
    double t = 0.0;
    Vec a, p;
    double gammaWrapped = 0.0;
    double gammaUnwrapped = 0.0;
    double mu = 1.0;
    AlphaCoefficients alpha;
    FieldNorms wNorms;
    double mass = 0.0;
    double energy = 0.0;
    Vec momentum;
    double hClassical = 0.0;
    double lambda = 0.0;

    RunRow() : a(Vec::Zero(1)), p(Vec::Zero(1)), momentum(Vec::Zero(1)) {}
};

struct RunSummary {
    double supWl2 = 0.0, supWh1 = 0.0, supWweighted = 0.0, supWenergy = 0.0;
    double supAlpha = 0.0;
    double supAbsP = 0.0, supEpsVabsA = 0.0;
    double epsV = 0.0, eps0 = 0.0, epsilon = 0.0, epsH = 0.0;
    double cHat = 0.0;           // supWenergy / epsilon (0 when epsilon = 0)
    double horizonMarker = 0.0;  // 1 / (epsV sqrt(epsH) + epsilon^2)
    double massDriftRel = 0.0;
    double energyDrift = 0.0;
    double muDrift = 0.0;
    double measuredCI = 0.0;     // max tangent-vector norm (H1 / weighted / generator image)
};

// max over the tangent fields z of (|z|_H1, |<epsV x>^{r/2} z|, max_j |K_j z|).
double measuredTangentConstant(const ProfileFamily& family, double mu, double epsV, double r);

struct RunResult {
    ExperimentConfig cfg;
    std::vector<RunRow> rows;
    RunSummary summary;
    // populated when keepFields is requested
    std::vector<Field> wFields;
    std::vector<double> lambdaSeries;
};

RunResult runExperiment(const ExperimentConfig& cfg, bool keepFields = false);

// Decomposition post-processing of an existing psi series (same row layout
// as runExperiment).
RunResult decomposeStates(const ExperimentConfig& cfg,
                          const std::vector<EvolutionState>& states);

ClassicalState rowState(const RunRow& row);  // with the unwrapped gamma

// Series persistence: fixed header, 17 significant digits, byte-stable.
void writeSeriesCsv(const std::string& path, const std::vector<RunRow>& rows, int d);
std::vector<RunRow> readSeriesCsv(const std::string& path);
std::string seriesCsvHeader(int d);

void writeSummaryJson(const std::string& path, const ExperimentConfig& cfg,
                      const RunSummary& summary,
                      const std::map<std::string, std::string>& extra = {});

// Raw psi snapshots for offline decomposition.
void writePsiDump(const std::string& path, const GridSpec& g,
                  const std::vector<EvolutionState>& states);
std::vector<EvolutionState> readPsiDump(const std::string& path, GridSpec& gOut);

struct TheoremCheckReport {
    RunSummary large, small;
    double cHat = 0.0;       // fitted on the large run
    double alphaRatio = 0.0; // sup|alpha| large / small
    double cP = 0.0;         // fitted momentum constant
    bool passNormBound = false;
    bool passAlphaScaling = false;
    bool passMomentumBound = false;
    bool pass() const { return passNormBound && passAlphaScaling && passMomentumBound; }
};

// Runs the config and its (epsV/2, eps0/2) partner and evaluates the scaling
// acceptance ratios.
TheoremCheckReport theoremCheck(const ExperimentConfig& base, RunResult* largeOut = nullptr,
                                RunResult* smallOut = nullptr);

struct LemmaCheckReport {
    double minLowerBoundCase1 = 0.0;
    double minLowerBoundCase2 = 0.0;
    double minLowerBoundQuartic = 0.0;
    double minGradMargin = 0.0;
    double minRvMargin = 0.0;
    double minMaxmin = 0.0;
    double minConvexity = 0.0;
    double minNormEquiv = 0.0;
    double equalityMaxmin = 0.0;     // |margin| at b = 2
    double equalityConvexity = 0.0;  // |margin| at r = 2
    bool pass(double tol = 1e-12) const;
};

LemmaCheckReport lemmaCheck(std::uint64_t seed, int samples);

struct ExactFamilyReport {
    double profileResidual = 0.0;
    double supL2Error = 0.0;
    double supAlpha = 0.0;
    double supWnorm = 0.0;
    double supDeltaA = 0.0;  // decomposed vs classical trajectory
    double supDeltaP = 0.0;
    bool pass(double resTol = 1e-9, double l2Tol = 1e-6, double alphaTol = 1e-6) const {
        return profileResidual <= resTol && supL2Error <= l2Tol && supAlpha <= alphaTol;
    }
};

// Exact-family end-to-end check: solves the confined profile, propagates,
// compares against the transported exact solution and decomposes the PDE run.
ExactFamilyReport exactFamilyCheck(const ExperimentConfig& cfg);

} // namespace solwave
