#pragma once

#include "bqh/modular.hpp"
#include "bqh/quadrature.hpp"

#include <map>
#include <string>
#include <vector>

namespace bqh {

// Resolved run configuration: suites, parameter overrides, quadrature
// strategy, output directory and seed. Unknown keys are rejected at parse
// time; every run writes its resolved form next to its reports.
struct RunConfig {
    std::vector<std::string> suites;
    double t = 8.0;
    double s = 8.5;
    double epsilon = 0.1;
    std::string budget = "med"; // low | med | high
    int jobs = 0;
    std::uint64_t seed = 20240811;
    std::string out_dir = "out";
    bool timings = false; // real wall times in reports (breaks byte-determinism)

    QSeriesConfig qseries;
    QuadratureSpec quadrature;

    // Budget-scaled specs for the two engine regimes.
    QuadratureSpec tensor_spec() const;
    QuadratureSpec qmc_spec(long base_points = 1L << 15) const;

    // Canonical key=value rendering; hashed into reports.
    std::string canonical_text() const;
    std::string fingerprint() const;
};

// INI-style parser: [section] headers with key = value lines, '#' or ';'
// comments. Throws std::invalid_argument on unknown keys or bad values.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Applies a "key=value" override in section.key form (e.g. "run.t=8").
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

} // namespace bqh
