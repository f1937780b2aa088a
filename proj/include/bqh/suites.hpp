#pragma once

#include "bqh/config.hpp"
#include "bqh/report.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bqh {

using SuiteFn = std::function<std::vector<VerificationReport>(const RunConfig&)>;

// Named verification suites; each maps onto one family of identities.
const std::vector<std::string>& suite_names();
bool has_suite(const std::string& name);

// Runs one suite; reports carry the config fingerprint. Wall times are
// zeroed unless cfg.timings is set, keeping reports byte-deterministic.
std::vector<VerificationReport> run_suite(const std::string& name, const RunConfig& cfg);

// Runs several suites (queue order preserved in the output). When jobs
// permits and more than one suite is queued, suites run concurrently with
// serial inner quadrature.
std::vector<VerificationReport> run_suites(const std::vector<std::string>& names,
                                           const RunConfig& cfg);

} // namespace bqh
