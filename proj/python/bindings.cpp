#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "layercode/analysis.hpp"
#include "layercode/decoder.hpp"
#include "layercode/errors.hpp"
#include "layercode/lattice.hpp"
#include "layercode/thermal.hpp"

namespace py = pybind11;
using namespace layercode;

namespace {

PauliError pauli(const LayerLattice& lat, const std::vector<std::size_t>& x, const std::vector<std::size_t>& z) {
    PauliError e(lat.num_qubits());
    for (auto q : x) {
        if (q >= lat.num_qubits()) throw py::index_error("qubit out of range");
        e.x.flip(q);
    }
    for (auto q : z) {
        if (q >= lat.num_qubits()) throw py::index_error("qubit out of range");
        e.z.flip(q);
    }
    return e;
}

PauliType type_of(const std::string& t) {
    if (t == "X") return PauliType::X;
    if (t == "Z") return PauliType::Z;
    throw py::value_error("type must be 'X' or 'Z'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Layer Code construction, decoding and thermal simulation";

    // Translators run newest first, so the base class goes in first.
    auto base = py::register_exception<Error>(m, "LayerCodeError");
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", base.ptr());
    py::register_exception<InvalidSyndrome>(m, "InvalidSyndrome", base.ptr());

    py::class_<CssCode>(m, "CssCode")
        .def_readonly("n", &CssCode::n)
        .def_readonly("k", &CssCode::k)
        .def_property_readonly("hx", [](const CssCode& c) { return c.hx.sparse_rows(); })
        .def_property_readonly("hz", [](const CssCode& c) { return c.hz.sparse_rows(); });
    m.def("load_css", &load_css, py::arg("path"));
    m.def("parse_css", [](const std::string& text) {
        std::istringstream in(text);
        return parse_css(in);
    });

    py::class_<LayerLattice>(m, "Lattice")
        .def_property_readonly("num_qubits", &LayerLattice::num_qubits)
        .def_property_readonly("k", &LayerLattice::k)
        .def_readonly("linear_size", &LayerLattice::linear_size)
        .def_readonly("extended", &LayerLattice::extended)
        .def_property_readonly("hx", [](const LayerLattice& l) { return l.hx.sparse_rows(); })
        .def_property_readonly("hz", [](const LayerLattice& l) { return l.hz.sparse_rows(); })
        .def("layer_counts", [](const LayerLattice& l) {
            py::dict d;
            d["grey"] = l.layers_of(LayerKind::Grey).size();
            d["blue"] = l.layers_of(LayerKind::Blue).size();
            d["red"] = l.layers_of(LayerKind::Red).size();
            return d;
        })
        .def("serialize", &serialize_lattice);
    m.def("build_layer_code", &build_layer_code, py::arg("code"), py::arg("surface_scale") = 3,
          py::arg("extended") = false);
    m.def("deserialize_lattice", &deserialize_lattice);
    m.def("validate", [](const LayerLattice& lat, std::size_t expected_k) {
        const auto r = validate_lattice(lat, expected_k);
        py::dict d;
        d["ok"] = r.ok();
        d["commutes"] = r.commutes;
        d["k"] = r.k;
        d["max_check_weight"] = r.max_check_weight;
        d["max_check_diameter"] = r.max_check_diameter;
        d["violations"] = r.violations;
        return d;
    });

    m.def(
        "syndrome",
        [](const LayerLattice& lat, const std::vector<std::size_t>& x, const std::vector<std::size_t>& z) {
            const auto s = extract_syndrome(lat, pauli(lat, x, z));
            return py::make_tuple(s.m.support(), s.e.support());
        },
        py::arg("lattice"), py::arg("x") = std::vector<std::size_t>{}, py::arg("z") = std::vector<std::size_t>{},
        "Lit faces (m) and vertices (e) of a Pauli frame.");

    m.def(
        "decode",
        [](const LayerLattice& lat, const std::vector<std::size_t>& m_sites, const std::vector<std::size_t>& e_sites,
           std::size_t threads) {
            LatticeSyndrome s{BitVec(lat.hz.rows()), BitVec(lat.hx.rows())};
            for (auto c : m_sites) s.m.flip(c);
            for (auto c : e_sites) s.e.flip(c);
            DecoderOptions opt;
            opt.threads = threads;
            opt.transcript = true;
            py::dict out;
            std::vector<std::string> transcript;
            for (auto t : {PauliType::X, PauliType::Z}) {
                DecodeResult r;
                {
                    py::gil_scoped_release release;
                    r = decode_type(lat, s, t, opt);
                }
                out[t == PauliType::X ? "x" : "z"] = r.correction.support();
                for (auto& l : r.transcript) transcript.push_back(std::string(1, to_char(t)) + " " + l);
            }
            out["transcript"] = transcript;
            return out;
        },
        py::arg("lattice"), py::arg("m"), py::arg("e"), py::arg("threads") = 1);

    m.def(
        "logical_failure_mask",
        [](const LayerLattice& lat, const std::vector<std::size_t>& x, const std::vector<std::size_t>& z) {
            return logical_failure_mask(lat, pauli(lat, x, z));
        },
        py::arg("lattice"), py::arg("x"), py::arg("z"));

    m.def(
        "energy_barrier",
        [](const LayerLattice& lat, const std::string& type, std::size_t state_budget) {
            BarrierOptions o;
            o.state_budget = state_budget;
            const auto r = energy_barrier_search(lat, type_of(type), o);
            return py::make_tuple(r.barrier, r.path);
        },
        py::arg("lattice"), py::arg("type") = "X", py::arg("state_budget") = std::size_t{1} << 22);

    m.def(
        "rate",
        [](double beta, double omega, const std::string& kind) {
            if (kind != "metropolis" && kind != "glauber") throw py::value_error("kind must be metropolis or glauber");
            return rate({beta, kind == "glauber" ? RateKind::Glauber : RateKind::Metropolis}, omega);
        },
        py::arg("beta"), py::arg("omega"), py::arg("kind") = "metropolis");

    m.def(
        "memory_time",
        [](const LayerLattice& lat, std::vector<double> betas, double t_max, std::size_t checkpoints,
           std::size_t trajectories, std::uint64_t seed, std::size_t threads) {
            MemoryExperiment exp;
            exp.betas = std::move(betas);
            exp.t_max = t_max;
            exp.checkpoints = geometric_schedule(t_max / 100, t_max, checkpoints);
            exp.trajectories = trajectories;
            exp.min_trajectories = std::min<std::size_t>(trajectories, 30);
            exp.master_seed = seed;
            exp.threads = threads;
            std::vector<MemoryCell> cells;
            {
                py::gil_scoped_release release;
                cells = estimate_memory_time(lat, exp);
            }
            py::list out;
            for (const auto& c : cells) {
                py::dict d;
                d["beta"] = c.beta;
                d["t_mem"] = c.t_mem ? py::cast(*c.t_mem) : py::none();
                d["ci"] = py::make_tuple(c.ci_low, c.ci_high);
                d["failure_fraction"] = c.failure_fraction;
                d["times"] = c.times;
                out.append(d);
            }
            return out;
        },
        py::arg("lattice"), py::arg("betas"), py::arg("t_max") = 20.0, py::arg("checkpoints") = 20,
        py::arg("trajectories") = 30, py::arg("seed") = 1, py::arg("threads") = 1);

    m.def(
        "bounds",
        [](double a, double beta, double m_, double k, double N, double L, double t) {
            BoundParams p;
            p.a = a;
            p.beta = beta;
            p.m = m_;
            p.k = k;
            p.N = N;
            p.L = L;
            const auto e = epsilon_bound(p, t);
            const auto tm = tmem_bound(p);
            py::dict d;
            d["eps_bound_log"] = e.closed_form_log;
            d["tmem_log"] = tm.general_log;
            d["lstar_conservative"] = tm.lstar_conservative;
            d["lstar_refined"] = tm.lstar_refined;
            return d;
        },
        py::arg("a"), py::arg("beta"), py::arg("m"), py::arg("k"), py::arg("N"), py::arg("L"), py::arg("t") = 1.0);
}
