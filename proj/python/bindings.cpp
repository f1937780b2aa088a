#include "bqh/bergman.hpp"
#include "bqh/deform.hpp"
#include "bqh/suites.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace bqh;

namespace {

Point to_point(std::complex<double> z) { return Point(z.real(), z.imag()); }

QuadratureSpec spec_from(int nodes, std::uint64_t seed) {
    QuadratureSpec s;
    s.radial_nodes = nodes;
    s.angular_nodes = nodes;
    s.seed = seed;
    return s;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "invariant Berezin symbol calculus on the upper half-plane: kernels, star "
              "products, traces and the verification suites";

    py::class_<Kernel>(m, "Kernel")
        .def("__call__",
             [](const Kernel& k, std::complex<double> z, std::complex<double> xi) {
                 return k(to_point(z), to_point(xi));
             })
        .def_property_readonly("label", &Kernel::label)
        .def_property_readonly("gamma_invariant", &Kernel::gamma_invariant)
        .def("adjoint", &Kernel::adjoint);

    m.def("delta", [](std::complex<double> z) { return delta(to_point(z)); },
          "weight-12 cusp form (unnormalized)");
    m.def("log_delta", [](std::complex<double> z) { return log_delta(to_point(z)); },
          "canonical continuous logarithm of delta");
    m.def("delta1", [](std::complex<double> z) { return delta1(to_point(z)); });
    m.def("normalization_constant", &normalization_constant);
    m.def("phi", [](std::complex<double> z, std::complex<double> xi) {
        return phi(to_point(z), to_point(xi)).value;
    });
    m.def("log_phi", [](std::complex<double> z, std::complex<double> xi) {
        return log_phi(to_point(z), to_point(xi));
    });
    m.def("weight_d", [](std::complex<double> z, std::complex<double> eta) {
        return weight_d(to_point(z), to_point(eta));
    });
    m.def("cross_ratio", [](std::complex<double> z, std::complex<double> eta,
                            std::complex<double> xi) {
        return cross_ratio(to_point(z), to_point(eta), to_point(xi));
    });
    m.def("log_cross_ratio", [](std::complex<double> z, std::complex<double> eta,
                                std::complex<double> xi) {
        return log_cross_ratio(to_point(z), to_point(eta), to_point(xi)).value;
    });
    m.def("reduce_to_fundamental_domain", [](std::complex<double> z) {
        auto [zr, g] = reduce_to_fundamental_domain(to_point(z));
        return py::make_tuple(zr.z(), py::make_tuple(g.a(), g.b(), g.c(), g.d()));
    });
    m.def("fundamental_domain_area",
          [](int nodes) { return fundamental_domain_area(nodes, nodes); },
          py::arg("nodes") = 64);
    m.def("c_t", &c_t);
    m.def("k_constant", &k_constant);

    m.def("constant_kernel",
          [](std::complex<double> v) { return constant_kernel(v); });
    m.def("phi_power_kernel", &phi_power_kernel, py::arg("eps"));
    m.def("rank_one_kernel",
          [](std::complex<double> a, std::complex<double> b, double t) {
              return rank_one_symbol(to_point(a), to_point(b), t);
          });
    m.def("lemma_shift_kernel", &lemma24_kernel, py::arg("t"), py::arg("eps"),
          "damped log-multiplier family with the nonpositivity shift");
    m.def("difference_family_kernel", &g_epsilon_family, py::arg("eps"), py::arg("t"));
    m.def("theta_kernel", &theta_map, py::arg("k"), py::arg("s"), py::arg("t"));

    m.def(
        "star_eval",
        [](const Kernel& k, const Kernel& l, double t, std::complex<double> z,
           std::complex<double> xi, int nodes, std::uint64_t seed) {
            return star_eval(k, l, t, to_point(z), to_point(xi), spec_from(nodes, seed));
        },
        py::arg("k"), py::arg("l"), py::arg("t"), py::arg("z"), py::arg("xi"),
        py::arg("nodes") = 64, py::arg("seed") = 0x5eed,
        "value of (k *_t l) at a probe pair by quadrature");
    m.def(
        "trace",
        [](const Kernel& k, int nodes, double cusp_limit) {
            return trace(k, spec_from(nodes, 0x5eed), cusp_limit);
        },
        py::arg("k"), py::arg("nodes") = 64, py::arg("cusp_limit") = 0.0);
    m.def(
        "hat_norm",
        [](const Kernel& k, double t, int nodes) {
            HatNorm h = hat_norm(k, t, spec_from(nodes, 0x5eed));
            return py::make_tuple(h.value, h.diverged);
        },
        py::arg("k"), py::arg("t"), py::arg("nodes") = 32);
    m.def(
        "psd_check",
        [](const Kernel& k, double t, const std::vector<std::complex<double>>& cloud,
           double tol) {
            PointCloud pts;
            for (auto c : cloud) pts.push_back(to_point(c));
            PsdCheck chk = psd_check(k, t, pts, tol);
            py::dict out;
            out["pass"] = chk.pass;
            out["min_eig"] = chk.gram.min_eig;
            out["max_eig"] = chk.gram.max_eig;
            out["difference_min_eig"] = chk.difference.min_eig;
            out["tol"] = chk.tol;
            return out;
        },
        py::arg("k"), py::arg("t"), py::arg("cloud"), py::arg("tol") = 0.0);

    m.def("suite_names", [] { return suite_names(); });
    m.def(
        "run_suite",
        [](const std::string& name, double t, double epsilon, const std::string& budget,
           std::uint64_t seed) {
            RunConfig cfg;
            cfg.t = t;
            cfg.epsilon = epsilon;
            cfg.budget = budget;
            cfg.seed = seed;
            return to_json(run_suite(name, cfg));
        },
        py::arg("name"), py::arg("t") = 8.0, py::arg("epsilon") = 0.1,
        py::arg("budget") = "med", py::arg("seed") = 20240811,
        "run a verification suite, returning its JSON report array");
}
