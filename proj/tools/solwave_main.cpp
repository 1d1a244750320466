#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "solwave/harness.hpp"

using namespace solwave;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitViolation = 2;

void reportFailure(const std::string& kind, const std::string& message) {
    std::printf("{\"status\": \"%s\", \"message\": \"%s\"}\n", kind.c_str(), message.c_str());
}

std::string outPath(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

ExperimentConfig loadConfig(const std::string& path, long seedOverride) {
    ExperimentConfig cfg = parseConfigFile(path);
    if (seedOverride >= 0) cfg.seed = static_cast<std::uint64_t>(seedOverride);
    return cfg;
}

void writeRun(const std::string& dir, const RunResult& run, const std::string& prefix,
              const std::map<std::string, std::string>& outcomes = {}) {
    writeSeriesCsv(outPath(dir, prefix + "series.csv"), run.rows, run.cfg.grid.d);
    writeSummaryJson(outPath(dir, prefix + "summary.json"), run.cfg, run.summary, outcomes);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"solwave: solitary-wave dynamics in confining potentials"};
    app.require_subcommand(1);

    std::string configPath, outDir = ".", psiPath;
    long seedOverride = -1;
    bool quiet = false, dumpPsi = false;
    double muOverride = -1.0;
    long samples = 10000;

    auto addCommon = [&](CLI::App* cmd) {
        cmd->add_option("--config", configPath, "config file")->required();
        cmd->add_option("--out", outDir, "output directory");
        cmd->add_option("--seed", seedOverride, "override the config seed");
        cmd->add_flag("--quiet", quiet, "suppress progress output");
    };

    auto* groundState = app.add_subcommand("ground-state", "solve and export a profile");
    addCommon(groundState);
    groundState->add_option("--mu", muOverride, "override initial.mu");

    auto* evolve = app.add_subcommand("evolve", "run a config, write series + summary");
    addCommon(evolve);
    evolve->add_flag("--dump-psi", dumpPsi, "also write raw psi snapshots");

    auto* decompSeries =
        app.add_subcommand("decompose-series", "decompose a saved psi series or run inline");
    addCommon(decompSeries);
    decompSeries->add_option("--psi", psiPath, "psi dump to post-process");

    auto* theorem = app.add_subcommand("theorem-check", "epsilon-scaling study pair");
    addCommon(theorem);

    auto* lemma = app.add_subcommand("lemma-check", "inequality property sweeps");
    lemma->add_option("--out", outDir, "output directory");
    lemma->add_option("--seed", seedOverride, "sweep seed");
    lemma->add_option("--samples", samples, "samples per lemma");
    lemma->add_flag("--quiet", quiet, "suppress progress output");

    auto* exact = app.add_subcommand("exact-family", "quadratic-potential end-to-end check");
    addCommon(exact);

    CLI11_PARSE(app, argc, argv);

    try {
        if (groundState->parsed()) {
            ExperimentConfig cfg = loadConfig(configPath, seedOverride);
            const double mu = muOverride > 0.0 ? muOverride : cfg.sigma0.mu;
            GroundStateOptions opts;
            opts.tol = cfg.groundStateTol;
            SolitonProfile prof = solveGroundState(cfg.nl, mu, cfg.grid, opts);
            writeProfileTable(outPath(outDir, "profile.txt"), prof);
            if (!quiet)
                std::printf("ground state mu=%g residual=%.3e mass=%.12g slope=%.12g\n", mu,
                            prof.residual, prof.mass, prof.massSlope);
            return prof.residual <= cfg.groundStateTol * l2Norm(prof.eta) * 10.0
                       ? 0
                       : kExitViolation;
        }

        if (evolve->parsed() || decompSeries->parsed()) {
            ExperimentConfig cfg = loadConfig(configPath, seedOverride);
            RunResult run;
            if (decompSeries->parsed() && !psiPath.empty()) {
                GridSpec g;
                auto states = readPsiDump(psiPath, g);
                if (g != cfg.grid) throw ConfigError("psi dump grid differs from config grid");
                run = decomposeStates(cfg, states);
            } else if (evolve->parsed() && dumpPsi) {
                auto family = makeProfileFamily(cfg);
                Field psi0 = buildInitialCondition(cfg, *family);
                Propagator prop(cfg.grid, cfg.pot, cfg.nl,
                                {cfg.dt, cfg.outputStride, cfg.dealias});
                std::vector<EvolutionState> states;
                prop.evolve({0.0, psi0}, cfg.T,
                            [&](const EvolutionState& st) { states.push_back(st); });
                writePsiDump(outPath(outDir, "psi.dat"), cfg.grid, states);
                run = decomposeStates(cfg, states);
            } else {
                run = runExperiment(cfg);
            }
            writeRun(outDir, run, "");
            if (!quiet)
                std::printf("rows=%zu sup|w|_E=%.6e sup|alpha|=%.6e\n", run.rows.size(),
                            run.summary.supWenergy, run.summary.supAlpha);
            return 0;
        }

        if (theorem->parsed()) {
            ExperimentConfig cfg = loadConfig(configPath, seedOverride);
            RunResult large, small;
            TheoremCheckReport rep = theoremCheck(cfg, &large, &small);
            std::map<std::string, std::string> outcomes{
                {"norm_bound", rep.passNormBound ? "pass" : "fail"},
                {"alpha_scaling", rep.passAlphaScaling ? "pass" : "fail"},
                {"momentum_bound", rep.passMomentumBound ? "pass" : "fail"},
                {"c_hat", std::to_string(rep.cHat)},
                {"alpha_ratio", std::to_string(rep.alphaRatio)},
                {"c_p", std::to_string(rep.cP)}};
            writeRun(outDir, large, "large_", outcomes);
            writeRun(outDir, small, "small_", outcomes);
            if (!quiet)
                std::printf("cHat=%.4f alphaRatio=%.3f norm=%s alpha=%s momentum=%s\n", rep.cHat,
                            rep.alphaRatio, rep.passNormBound ? "pass" : "FAIL",
                            rep.passAlphaScaling ? "pass" : "FAIL",
                            rep.passMomentumBound ? "pass" : "FAIL");
            if (!rep.pass()) {
                reportFailure("violation", "theorem-check scaling criteria failed");
                return kExitViolation;
            }
            return 0;
        }

        if (lemma->parsed()) {
            const std::uint64_t seed = seedOverride >= 0 ? seedOverride : 1;
            LemmaCheckReport rep = lemmaCheck(seed, static_cast<int>(samples));
            if (!quiet) {
                std::printf("lower bound margins: case1=%.3e case2=%.3e quartic=%.3e\n",
                            rep.minLowerBoundCase1, rep.minLowerBoundCase2,
                            rep.minLowerBoundQuartic);
                std::printf("upper bound margins: gradA=%.3e rv=%.3e\n", rep.minGradMargin,
                            rep.minRvMargin);
                std::printf("scalar margins: maxmin=%.3e convexity=%.3e normEquiv=%.3e\n",
                            rep.minMaxmin, rep.minConvexity, rep.minNormEquiv);
                std::printf("equality cases: maxmin=%.3e convexity=%.3e\n", rep.equalityMaxmin,
                            rep.equalityConvexity);
            }
            if (!rep.pass()) {
                reportFailure("violation", "lemma margins below -1e-12");
                return kExitViolation;
            }
            return 0;
        }

        if (exact->parsed()) {
            ExperimentConfig cfg = loadConfig(configPath, seedOverride);
            ExactFamilyReport rep = exactFamilyCheck(cfg);
            if (!quiet)
                std::printf(
                    "residual=%.3e supL2=%.3e supAlpha=%.3e supW=%.3e dA=%.3e dP=%.3e\n",
                    rep.profileResidual, rep.supL2Error, rep.supAlpha, rep.supWnorm,
                    rep.supDeltaA, rep.supDeltaP);
            if (!rep.pass()) {
                reportFailure("violation", "exact-family error budget exceeded");
                return kExitViolation;
            }
            return 0;
        }
    } catch (const std::exception& e) {
        reportFailure("error", e.what());
        return kExitRuntime;
    }
    return 0;
}
