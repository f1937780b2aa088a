#include "bqh/report.hpp"

#include <nlohmann/json.hpp>

namespace bqh {

namespace {

nlohmann::ordered_json report_json(const VerificationReport& r) {
    nlohmann::ordered_json j;
    j["identity_id"] = r.identity_id;
    j["paper_ref"] = r.ref_note;
    nlohmann::ordered_json inputs;
    inputs["labels"] = r.input_labels;
    inputs["params"] = r.input_params;
    j["inputs"] = inputs;
    j["residuals"] = r.residuals;
    if (!r.details.empty()) j["details"] = r.details;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["spec_hash"] = r.spec_hash;
    j["wall_time_ms"] = r.wall_time_ms;
    return j;
}

} // namespace

std::string to_json(const VerificationReport& report) { return report_json(report).dump(2); }

std::string to_json(const std::vector<VerificationReport>& reports) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(report_json(r));
    return arr.dump(2);
}

std::string csv_escape(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

} // namespace bqh
