#pragma once

#include <map>
#include <string>
#include <vector>

namespace bqh {

// One verified identity: residuals, tolerance, verdict, and the provenance
// of the inputs that produced them.
struct VerificationReport {
    std::string identity_id;
    std::string ref_note; // serialized under the "paper_ref" schema key
    std::vector<std::string> input_labels;
    std::map<std::string, double> input_params;
    std::vector<double> residuals;
    std::map<std::string, double> details; // fitted constants, eigenvalues, ...
    double tolerance = 0.0;
    bool pass = false;
    std::string spec_hash;
    long wall_time_ms = 0;
};

std::string to_json(const VerificationReport& report);
std::string to_json(const std::vector<VerificationReport>& reports);

// RFC-4180 CSV quoting.
std::string csv_escape(const std::string& field);

} // namespace bqh
