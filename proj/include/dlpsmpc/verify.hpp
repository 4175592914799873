#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dlp {

struct VerifyOptions {
    std::uint64_t seed = 20240601;
    /// Negative control: flips the sign of the analytical objective gradient
    /// under test, so the gradient suite must fail.
    bool corrupt_gradient_sign = false;
    std::size_t gradient_instances = 1000;
    std::size_t moment_instances = 500;
    std::size_t dlp_instances = 20;
    std::size_t grid_points = 400;
    std::size_t survival_paths = 10000;
    std::size_t drawdown_curves = 100;
};

struct SuiteOutcome {
    std::string name;
    bool passed = false;
    std::size_t checks = 0;
    std::size_t failures = 0;
    double worst = 0.0;  // worst error statistic of the suite
    std::string detail;
};

SuiteOutcome verify_gradient(const VerifyOptions& opts);
SuiteOutcome verify_moments(const VerifyOptions& opts);
SuiteOutcome verify_solver(const VerifyOptions& opts);
SuiteOutcome verify_survivability(const VerifyOptions& opts);
SuiteOutcome verify_metrics(const VerifyOptions& opts);

/// All suites above, in order. Self-contained: no data files are read.
std::vector<SuiteOutcome> run_verification(const VerifyOptions& opts);

}  // namespace dlp
