#pragma once

#include <stdexcept>
#include <string>

namespace solwave {

struct GridMismatch : std::runtime_error {
    explicit GridMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct NonConvergence : std::runtime_error {
    explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

struct CollapseToZero : std::runtime_error {
    explicit CollapseToZero(const std::string& what) : std::runtime_error(what) {}
};

struct StabilityViolation : std::runtime_error {
    explicit StabilityViolation(const std::string& what) : std::runtime_error(what) {}
};

struct HypothesisViolation : std::runtime_error {
    explicit HypothesisViolation(const std::string& what) : std::runtime_error(what) {}
};

struct MassOutOfRange : std::runtime_error {
    explicit MassOutOfRange(const std::string& what) : std::runtime_error(what) {}
};

struct OutOfTube : std::runtime_error {
    explicit OutOfTube(const std::string& what) : std::runtime_error(what) {}
};

struct MaxIterations : std::runtime_error {
    explicit MaxIterations(const std::string& what) : std::runtime_error(what) {}
};

struct SingularSystem : std::runtime_error {
    explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

struct SeriesTooShort : std::runtime_error {
    explicit SeriesTooShort(const std::string& what) : std::runtime_error(what) {}
};

struct PhaseWrapGuard : std::runtime_error {
    explicit PhaseWrapGuard(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace solwave
