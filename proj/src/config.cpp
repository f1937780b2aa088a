#include "bqh/config.hpp"

#include "bqh/util.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bqh {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw std::invalid_argument("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

long to_long(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        long d = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw std::invalid_argument("config: bad integer value for " + key + ": '" + v + "'");
    }
}

} // namespace

QuadratureSpec RunConfig::tensor_spec() const {
    QuadratureSpec s = quadrature;
    s.scheme = Scheme::TensorGrid;
    s.jobs = jobs;
    s.seed = seed;
    double factor = budget == "low" ? 0.5 : budget == "high" ? 1.5 : 1.0;
    return s.scaled(factor);
}

QuadratureSpec RunConfig::qmc_spec(long base_points) const {
    QuadratureSpec s = quadrature;
    s.scheme = Scheme::QuasiRandom;
    s.jobs = jobs;
    s.seed = seed;
    long factor = budget == "low" ? 2 : budget == "high" ? 4 : 1;
    s.qmc_points = budget == "low" ? base_points / factor
                                   : (budget == "high" ? base_points * factor : base_points);
    return s;
}

std::string RunConfig::canonical_text() const {
    std::ostringstream os;
    os << "[run]\n";
    os << "suite = ";
    for (std::size_t i = 0; i < suites.size(); ++i) os << (i ? "," : "") << suites[i];
    os << "\n";
    os << "t = " << t << "\n";
    os << "s = " << s << "\n";
    os << "epsilon = " << epsilon << "\n";
    os << "budget = " << budget << "\n";
    os << "jobs = " << jobs << "\n";
    os << "seed = " << seed << "\n";
    os << "out = " << out_dir << "\n";
    os << "timings = " << (timings ? 1 : 0) << "\n";
    os << "[qseries]\n";
    os << "truncation_order = " << qseries.truncation_order << "\n";
    os << "min_im = " << qseries.min_im << "\n";
    os << "[quadrature]\n";
    os << "scheme = "
       << (quadrature.scheme == Scheme::TensorGrid
               ? "tensor-grid"
               : (quadrature.scheme == Scheme::Adaptive ? "adaptive" : "quasi-random"))
       << "\n";
    os << "radial_nodes = " << quadrature.radial_nodes << "\n";
    os << "angular_nodes = " << quadrature.angular_nodes << "\n";
    os << "qmc_points = " << quadrature.qmc_points << "\n";
    os << "target_rel_tol = " << quadrature.target_rel_tol << "\n";
    os << "im_cut = " << quadrature.im_cut << "\n";
    os << "importance_exponent = " << quadrature.importance_exponent << "\n";
    return os.str();
}

std::string RunConfig::fingerprint() const {
    return to_hex(fnv1a64(canonical_text() + "|report-schema-1"));
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "run.suite") {
        cfg.suites.clear();
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) cfg.suites.push_back(item);
        }
    } else if (key == "run.t") {
        cfg.t = to_double(v, key);
    } else if (key == "run.s") {
        cfg.s = to_double(v, key);
    } else if (key == "run.epsilon") {
        cfg.epsilon = to_double(v, key);
    } else if (key == "run.budget") {
        if (v != "low" && v != "med" && v != "high")
            throw std::invalid_argument("config: budget must be low, med or high");
        cfg.budget = v;
    } else if (key == "run.jobs") {
        cfg.jobs = static_cast<int>(to_long(v, key));
    } else if (key == "run.seed") {
        cfg.seed = static_cast<std::uint64_t>(to_long(v, key));
    } else if (key == "run.out") {
        cfg.out_dir = v;
    } else if (key == "run.timings") {
        cfg.timings = v == "1" || v == "true";
    } else if (key == "qseries.truncation_order") {
        cfg.qseries.truncation_order = static_cast<int>(to_long(v, key));
    } else if (key == "qseries.min_im") {
        cfg.qseries.min_im = to_double(v, key);
    } else if (key == "quadrature.scheme") {
        if (v == "tensor-grid") cfg.quadrature.scheme = Scheme::TensorGrid;
        else if (v == "adaptive") cfg.quadrature.scheme = Scheme::Adaptive;
        else if (v == "quasi-random") cfg.quadrature.scheme = Scheme::QuasiRandom;
        else throw std::invalid_argument("config: unknown scheme '" + v + "'");
    } else if (key == "quadrature.radial_nodes") {
        cfg.quadrature.radial_nodes = static_cast<int>(to_long(v, key));
    } else if (key == "quadrature.angular_nodes") {
        cfg.quadrature.angular_nodes = static_cast<int>(to_long(v, key));
    } else if (key == "quadrature.qmc_points") {
        cfg.quadrature.qmc_points = to_long(v, key);
    } else if (key == "quadrature.target_rel_tol") {
        cfg.quadrature.target_rel_tol = to_double(v, key);
    } else if (key == "quadrature.im_cut") {
        cfg.quadrature.im_cut = to_double(v, key);
    } else if (key == "quadrature.importance_exponent") {
        cfg.quadrature.importance_exponent = to_double(v, key);
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section = "run";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::invalid_argument("config: bad section header at line " +
                                            std::to_string(lineno));
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(lineno));
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        apply_override(cfg, section + "." + key, value);
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace bqh
