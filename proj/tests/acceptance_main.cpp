// Acceptance gate: one runnable criterion per command, each printing a
// single PASS/FAIL line with its residual summary and wall time.

#include "bqh/suites.hpp"

#include <chrono>
#include <cstring>
#include <iostream>

using namespace bqh;

namespace {

struct Outcome {
    bool pass = false;
    double worst = 0.0;
    std::string note;
};

RunConfig base_config() {
    RunConfig cfg;
    cfg.seed = 20240811;
    cfg.budget = "med";
    cfg.t = 8.0;
    cfg.epsilon = 0.1;
    return cfg;
}

Outcome from_reports(const std::vector<VerificationReport>& reports, double limit_s,
                     double elapsed_s) {
    Outcome out;
    out.pass = true;
    for (const auto& r : reports) {
        out.pass = out.pass && r.pass;
        for (double v : r.residuals) out.worst = std::max(out.worst, v);
    }
    if (elapsed_s > limit_s) {
        out.pass = false;
        out.note = " (over the runtime limit)";
    }
    return out;
}

Outcome run_simple(const std::string& suite, double limit_s, const RunConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<VerificationReport> reports = run_suite(suite, cfg);
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome out = from_reports(reports, limit_s, elapsed);
    out.note += " [" + std::to_string(elapsed) + "s]";
    return out;
}

Outcome criterion_determinism() {
    RunConfig cfg = base_config();
    cfg.budget = "low";
    auto t0 = std::chrono::steady_clock::now();
    std::string a = to_json(run_suites({"area", "monotonicity", "positivity-basic"}, cfg));
    std::string b = to_json(run_suites({"area", "monotonicity", "positivity-basic"}, cfg));
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Outcome out;
    out.pass = a == b;
    out.worst = out.pass ? 0.0 : 1.0;
    out.note = std::string(out.pass ? " byte-identical" : " reports differ") + " [" +
               std::to_string(elapsed) + "s]";
    return out;
}

} // namespace

int main(int argc, char** argv) {
    int which = 0; // 0 = all
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) which = std::atoi(argv[++i]);
    }
    struct Entry {
        int id;
        const char* label;
        Outcome (*fn)();
    };
    static const Entry entries[] = {
        {1, "reproducing calibration",
         [] { return run_simple("calibration", 60.0, base_config()); }},
        {2, "fundamental-domain area", [] { return run_simple("area", 5.0, base_config()); }},
        {3, "rank-one star-product oracle",
         [] { return run_simple("rankone-star", 300.0, base_config()); }},
        {4, "finite-section oracle",
         [] { return run_simple("bergman-oracle", 300.0, base_config()); }},
        {5, "positivity suite", [] { return run_simple("positivity-basic", 120.0, base_config()); }},
        {6, "monotonicity suites",
         [] { return run_simple("monotonicity", 120.0, base_config()); }},
        {7, "trace identities",
         [] { return run_simple("trace-identities", 120.0, base_config()); }},
        {8, "test-vector analytic suite",
         [] { return run_simple("analytic-s5", 600.0, base_config()); }},
        {9, "coboundary suite", [] { return run_simple("coboundary", 1800.0, base_config()); }},
        {10, "dual and general coboundary suite",
         [] {
             RunConfig cfg = base_config();
             cfg.budget = "high";
             return run_simple("dual-appendix", 2700.0, cfg);
         }},
        {11, "determinism", [] { return criterion_determinism(); }},
    };
    bool all_pass = true;
    for (const Entry& e : entries) {
        if (which != 0 && which != e.id) continue;
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out.pass = false;
            out.note = std::string(" exception: ") + ex.what();
        }
        std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << e.id << ": " << e.label
                  << "  worst-residual=" << out.worst << out.note << std::endl;
        all_pass = all_pass && out.pass;
    }
    return all_pass ? 0 : 1;
}
