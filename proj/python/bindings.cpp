#include "killing_lab/albert.hpp"
#include "killing_lab/cli.hpp"
#include "killing_lab/killing_system.hpp"
#include "killing_lab/space_catalog.hpp"
#include "killing_lab/taylor_flow.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;

namespace {

kl::AlbertD albert_from(const std::vector<double>& c) {
    if (c.size() != 27) throw std::invalid_argument("expected 27 coordinates (r1, r2, r3, x1, x2, x3)");
    kl::AlbertD a;
    for (int k = 0; k < 27; ++k) a.coord(k) = c[k];
    return a;
}

std::vector<double> albert_coords(const kl::AlbertD& a) {
    std::vector<double> c(27);
    for (int k = 0; k < 27; ++k) c[k] = a.coord(k);
    return c;
}

py::dict solve(const std::string& space_id, int d, int include_eq22, bool rank1_shortcut, int primes, uint64_t seed) {
    const kl::SymmetricSpaceModel space = kl::make_space(space_id);
    kl::ReportOptions opt;
    opt.d = d;
    opt.include_eq22 = include_eq22;
    opt.rank1_shortcut = rank1_shortcut;
    opt.solve.primes = primes;
    opt.solve.seed = seed;
    kl::SolutionReport rep;
    {
        py::gil_scoped_release release;
        rep = kl::indecomposability_report(space, opt);
    }
    kl::RunConfig cfg;
    cfg.command = "solve";
    cfg.space = space_id;
    cfg.d = d;
    cfg.include_eq22 = include_eq22;
    cfg.rank1_shortcut = rank1_shortcut;
    cfg.primes = primes;
    cfg.seed = seed;
    py::module_ json = py::module_::import("json");
    return json.attr("loads")(kl::report_to_json(rep, cfg, false).dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Killing tensors on symmetric spaces";

    py::register_exception<kl::CertificationError>(m, "CertificationError");

    m.def(
        "catalog",
        [] {
            py::list out;
            for (const auto& e : kl::catalog()) {
                py::dict d;
                d["id"] = e.id;
                d["n"] = e.n;
                d["rank"] = e.rank;
                d["isotropy_dim"] = e.isotropy_dim;
                d["note"] = e.note;
                out.append(d);
            }
            return out;
        },
        "Registered spaces.");
    m.def("solve", &solve, py::arg("space"), py::arg("d") = 2, py::arg("include_eq22") = -1,
          py::arg("rank1_shortcut") = false, py::arg("primes") = 3, py::arg("seed") = 20240901,
          "Solution, decomposable and indecomposable dimensions as a report dict.");
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = kl::run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a killing-lab command line; returns (exit_code, stdout, stderr).");
    m.def("content_hash", &kl::content_hash, py::arg("data"));

    m.def("bernoulli_c", [](int k) { return kl::bernoulli_c(k).str(); }, py::arg("m"));
    m.def("metric_coeff", [](int k) { return kl::metric_coeff(k).str(); }, py::arg("m"));
    m.def("odd_field_coeff", [](int k) { return kl::odd_field_coeff(k).str(); }, py::arg("k"));

    m.def("albert_det", [](const std::vector<double>& a) { return kl::det(albert_from(a)); }, py::arg("a"));
    m.def(
        "albert_phi",
        [](const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& c) {
            return kl::phi(albert_from(a), albert_from(b), albert_from(c));
        },
        py::arg("a"), py::arg("b"), py::arg("c"));
    m.def(
        "jordan_mul",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            return albert_coords(kl::jordan_mul(albert_from(a), albert_from(b)));
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "tangent_basis_at_E",
        [] {
            std::vector<std::vector<double>> out;
            for (const auto& v : kl::tangent_basis_at_E()) {
                std::vector<double> c(27);
                for (int k = 0; k < 27; ++k) c[k] = v.coord(k).to_double();
                out.push_back(c);
            }
            return out;
        });
    m.def(
        "embedded_geodesic_check",
        [](const std::vector<double>& A, uint64_t seed, double s_max, int steps) {
            const kl::AlbertD X0 = kl::random_cayley_point(seed);
            const kl::AlbertD V0 = kl::random_unit_tangent(X0, seed + 1);
            py::gil_scoped_release release;
            return kl::embedded_geodesic_check(albert_from(A), X0, V0, s_max, steps).max_deviation;
        },
        py::arg("A"), py::arg("seed") = 1, py::arg("s_max") = 3.141592653589793, py::arg("steps") = 1000,
        "Max deviation of phi(g', g', A) along a random geodesic of the embedded Cayley plane.");
}
