#include "bqh/bergman.hpp"
#include "bqh/deform.hpp"
#include "bqh/suites.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace bqh;

namespace {

std::vector<double> parse_numbers(const std::string& text, char sep) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::vector<Point> parse_points(const std::string& text) {
    // "re,im;re,im;..."
    std::vector<Point> pts;
    std::stringstream ss(text);
    std::string chunk;
    while (std::getline(ss, chunk, ';')) {
        if (chunk.empty()) continue;
        std::vector<double> nums = parse_numbers(chunk, ',');
        if (nums.size() != 2) throw CLI::ValidationError("points", "expected re,im pairs");
        pts.emplace_back(nums[0], nums[1]);
    }
    return pts;
}

Kernel kernel_by_label(const std::string& label, double eps, double t) {
    if (label == "one") return constant_kernel(Complex(1.0, 0.0));
    if (label == "phi") return phi_power_kernel(eps);
    if (label == "lnphi12") return log_phi_twelfth_kernel();
    if (label == "lemma24") return lemma24_kernel(t, eps);
    if (label == "g") return g_epsilon_family(eps, t);
    throw CLI::ValidationError("kernel", "unknown kernel label '" + label + "'");
}

int write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot open output file " << path << "\n";
        return 2;
    }
    out << text;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical workbench for the invariant symbol calculus on the upper "
                 "half-plane"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::string suite_arg;
    app.add_option("--config", config_path, "configuration file (ini)")->expected(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--t", cfg.t, "deformation parameter t");
        sub->add_option("--s", cfg.s, "second parameter s");
        sub->add_option("--epsilon", cfg.epsilon, "damping exponent");
        sub->add_option("--budget", cfg.budget, "low|med|high")
            ->check(CLI::IsMember({"low", "med", "high"}));
        sub->add_option("--jobs", cfg.jobs, "worker threads (0 = hardware)");
        sub->add_option("--seed", cfg.seed, "base seed for all sampling");
        sub->add_option("--out", cfg.out_dir, "output directory or file");
        sub->add_flag("--timings", cfg.timings, "embed real wall times in reports");
    };

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "evaluate objects at points, CSV to stdout");
    std::string object = "delta";
    std::string points_arg = "0,1";
    std::string kernel_label = "one";
    int trunc = QSeriesConfig{}.truncation_order;
    eval->add_option("object", object, "delta|log_delta|phi|log_phi|kernel")
        ->check(CLI::IsMember({"delta", "log_delta", "phi", "log_phi", "kernel"}));
    eval->add_option("--points", points_arg,
                     "semicolon-separated re,im pairs (bivariable objects read them as "
                     "z;xi;z;xi;...)");
    eval->add_option("--kernel", kernel_label, "kernel label for object=kernel");
    eval->add_option("--truncation-order", trunc, "q-series truncation order");
    add_common(eval);

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "run named verification suites");
    verify->add_option("--suite", suite_arg, "suite name, comma list, or 'all'")->required();
    add_common(verify);

    // ---- plotdata ----
    auto* plot = app.add_subcommand("plotdata", "emit plot-ready CSV tables");
    std::string kind = "kernel-heatmap";
    plot->add_option("kind", kind, "kernel-heatmap|residual-vs-budget|eigen-spectrum")
        ->check(CLI::IsMember({"kernel-heatmap", "residual-vs-budget", "eigen-spectrum"}));
    add_common(plot);

    // ---- suites ----
    auto* list = app.add_subcommand("suites", "list available suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) {
            RunConfig merged = load_config_file(config_path);
            CLI::App* active = app.get_subcommands().front();
            if (active->count("--t")) merged.t = cfg.t;
            if (active->count("--s")) merged.s = cfg.s;
            if (active->count("--epsilon")) merged.epsilon = cfg.epsilon;
            if (active->count("--budget")) merged.budget = cfg.budget;
            if (active->count("--jobs")) merged.jobs = cfg.jobs;
            if (active->count("--seed")) merged.seed = cfg.seed;
            if (active->count("--out")) merged.out_dir = cfg.out_dir;
            if (active->count("--timings")) merged.timings = cfg.timings;
            cfg = merged;
        }
        cfg.qseries.truncation_order = std::max(cfg.qseries.truncation_order, trunc);

        if (list->parsed()) {
            for (const auto& name : suite_names()) std::cout << name << "\n";
            return 0;
        }

        if (eval->parsed()) {
            std::vector<Point> pts = parse_points(points_arg);
            QSeriesConfig qc = cfg.qseries;
            std::ostringstream csv;
            bool bivariate = object == "phi" || object == "log_phi" || object == "kernel";
            if (bivariate && pts.size() % 2 != 0)
                throw std::invalid_argument("bivariable objects need z;xi point pairs");
            if (bivariate) {
                csv << "z_re,z_im,xi_re,xi_im,value_re,value_im,branch,truncation_order\n";
                Kernel k = kernel_by_label(kernel_label, cfg.epsilon, cfg.t);
                for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
                    Complex v;
                    if (object == "phi") v = phi(pts[i], pts[i + 1], qc).value;
                    else if (object == "log_phi") v = log_phi(pts[i], pts[i + 1], qc);
                    else v = k(pts[i], pts[i + 1]);
                    csv << pts[i].re() << "," << pts[i].im() << "," << pts[i + 1].re() << ","
                        << pts[i + 1].im() << "," << v.real() << "," << v.imag()
                        << ",principal-factor-log," << qc.truncation_order << "\n";
                }
            } else {
                csv << "re,im,value_re,value_im,branch,truncation_order\n";
                for (const Point& p : pts) {
                    Complex v = object == "delta" ? delta(p, qc) : log_delta(p, qc);
                    csv << p.re() << "," << p.im() << "," << v.real() << "," << v.imag()
                        << ",principal-factor-log," << qc.truncation_order << "\n";
                }
            }
            return write_text(eval->count("--out") ? cfg.out_dir : "-", csv.str());
        }

        if (plot->parsed()) {
            std::ostringstream csv;
            if (kind == "kernel-heatmap") {
                csv << "x,y,abs_phi\n";
                Point xi(0.0, 1.0);
                for (int i = 0; i < 40; ++i) {
                    double x = -0.5 + (i + 0.5) / 40.0;
                    for (int j = 0; j < 40; ++j) {
                        double y = 0.9 + 2.0 * j / 39.0;
                        if (x * x + y * y < 1.0) continue;
                        csv << x << "," << y << "," << std::abs(phi(Point(x, y), xi).value)
                            << "\n";
                    }
                }
            } else if (kind == "residual-vs-budget") {
                csv << "nodes,residual\n";
                double t = cfg.t;
                Point z(0.2, 1.0), xi(-0.4, 1.7);
                auto f = [&](const Point& eta) { return cross_ratio_pow(z, eta, xi, t); };
                for (int n : {12, 16, 24, 32, 48, 64}) {
                    QuadratureSpec s;
                    s.radial_nodes = n;
                    s.angular_nodes = n;
                    s.jobs = cfg.jobs;
                    IntegralResult q =
                        integrate_H(f, Measure::nu0(), s, hyperbolic_midpoint(z, xi), 2.0 * t);
                    csv << n * n << "," << std::abs(c_t(t) * q.value - 1.0) << "\n";
                }
            } else { // eigen-spectrum
                csv << "index,eigenvalue\n";
                PointCloud cloud = {Point(0, 1),    Point(0.4, 1.2), Point(-0.5, 1.6),
                                    Point(0.2, 0.9), Point(-0.2, 2.0), Point(0.05, 1.4)};
                Eigen::MatrixXcd g =
                    gram_matrix(lemma24_kernel(cfg.t, cfg.epsilon), cfg.t, cloud);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (g + g.adjoint()));
                for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
                    csv << i << "," << solver.eigenvalues()(i) << "\n";
            }
            return write_text(plot->count("--out") ? cfg.out_dir : "-", csv.str());
        }

        if (verify->parsed()) {
            std::vector<std::string> names;
            if (suite_arg == "all") {
                names = suite_names();
            } else {
                std::stringstream ss(suite_arg);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    if (!item.empty()) names.push_back(item);
                }
            }
            for (const auto& n : names) {
                if (!has_suite(n)) {
                    std::cerr << "unknown suite '" << n << "'\n";
                    return 2;
                }
            }
            cfg.suites = names;
            std::filesystem::create_directories(cfg.out_dir);
            {
                std::ofstream resolved(cfg.out_dir + "/config.resolved.ini", std::ios::binary);
                resolved << cfg.canonical_text();
            }
            bool all_pass = true;
            for (const auto& name : names) {
                std::vector<VerificationReport> reports = run_suite(name, cfg);
                std::ofstream out(cfg.out_dir + "/" + name + ".json", std::ios::binary);
                out << to_json(reports) << "\n";
                for (const auto& r : reports) {
                    double worst = 0.0;
                    for (double v : r.residuals) worst = std::max(worst, v);
                    std::cout << (r.pass ? "PASS" : "FAIL") << " " << name << "/"
                              << r.identity_id << "  max-residual=" << worst
                              << "  tol=" << r.tolerance << "\n";
                    all_pass = all_pass && r.pass;
                }
            }
            return all_pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
