// Copyright 2026 The noisebench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Structured values cross the boundary as JSON-compatible
// dicts and lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "noisebench/bench.hpp"
#include "noisebench/edc.hpp"
#include "noisebench/error.hpp"
#include "noisebench/gst.hpp"
#include "noisebench/knr.hpp"
#include "noisebench/metrics.hpp"
#include "noisebench/rc.hpp"

namespace py = pybind11;
using json = nlohmann::json;
using namespace noisebench;

namespace {

json to_json(const py::handle &obj) {
    return json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

py::object to_py(const json &j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

Circuit circuit_arg(const py::handle &c) {
    return circuit_from_json(to_json(c));
}

DeviceProfile profile_arg(const py::handle &p) {
    if (py::isinstance<py::str>(p)) {
        std::string s = p.cast<std::string>();
        return s == "toronto-like" ? toronto_like_profile() : load_profile(s);
    }
    return profile_from_json(to_json(p));
}

NoiseModel model_arg(const py::handle &m) {
    json j = to_json(m);
    return j.contains("cnot") ? compose_model(edc_model_from_json(j)) : noise_model_from_json(j);
}

Distribution dist_arg(const py::handle &d) {
    Distribution out;
    out.probs = d.cast<std::map<std::string, double>>();
    return out;
}

json counts_list(const std::vector<Counts> &cs) {
    json out = json::array();
    for (const auto &c : cs) {
        out.push_back(counts_to_json(c));
    }
    return out;
}

class PyQpu {
   public:
    PyQpu(const py::handle &profile, std::optional<std::string> store) : qpu_(profile_arg(profile), std::move(store)) {}

    py::object run(const py::list &circuits, std::uint64_t shots, std::uint64_t seed) {
        std::vector<Circuit> cs;
        for (const auto &c : circuits) {
            cs.push_back(circuit_arg(c));
        }
        std::vector<Counts> out;
        {
            py::gil_scoped_release release;
            out = qpu_.run(cs, shots, seed);
        }
        return to_py(counts_list(out));
    }

    std::vector<std::string> submit(const py::list &circuits, std::uint64_t shots, std::uint64_t seed) {
        std::vector<Circuit> cs;
        for (const auto &c : circuits) {
            cs.push_back(circuit_arg(c));
        }
        std::vector<std::string> ids;
        for (const auto &job : qpu_.submit(cs, shots, seed)) {
            ids.push_back(job.id);
        }
        return ids;
    }

    py::object fetch(const std::string &id) const {
        return to_py(job_to_json(qpu_.fetch(id)));
    }

    py::object profile() const {
        return to_py(profile_to_json(qpu_.profile()));
    }

    VirtualQpu &device() {
        return qpu_;
    }

   private:
    VirtualQpu qpu_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "noisebench core";

    // Translators run newest first, so the base class goes first.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    // Pauli channels
    m.def("channel_to_fidelities", [](const py::dict &rates) {
        json out = json::object();
        FidelityVector fv = channel_to_fidelities(pauli_channel_from_json(to_json(rates)));
        for (const auto &[p, f] : fv.values()) {
            out[p.str()] = f;
        }
        return to_py(out);
    });
    m.def("fidelities_to_channel", [](const py::dict &fids) {
        std::map<PauliString, double> values;
        std::vector<PauliString> support;
        std::size_t n = 0;
        for (const auto &[k, v] : fids) {
            PauliString p = PauliString::from_str(k.cast<std::string>());
            n = p.num_qubits();
            values[p] = v.cast<double>();
            support.push_back(p);
        }
        return to_py(pauli_channel_to_json(fidelities_to_channel(FidelityVector(n, values), support)));
    });
    m.def("depolarizing_channel", [](double p, std::vector<int> qubits) {
        return to_py(pauli_channel_to_json(depolarizing_to_pauli({p, std::move(qubits)})));
    });
    m.def("twirl_average_overrotation", [](double theta, std::size_t n) {
        return to_py(pauli_channel_to_json(twirl_average_overrotation(theta, n)));
    });

    // Circuits
    m.def("build_bell", [](int c, int t, int n) { return to_py(circuit_to_json(build_bell(c, t, n))); },
          py::arg("control"), py::arg("target"), py::arg("num_qubits") = 0);
    m.def(
        "build_ghz",
        [](int size, const py::object &mapping, int n) {
            GhzMapping gm = mapping.is_none() ? toronto_ghz_mapping() : ghz_mapping_from_json(to_json(mapping));
            return to_py(circuit_to_json(build_ghz(size, gm, nullptr, n)));
        },
        py::arg("n"), py::arg("mapping") = py::none(), py::arg("num_qubits") = 0);
    m.def(
        "build_bv",
        [](const std::string &secret, const std::vector<int> &data, int oracle, int n) {
            return to_py(circuit_to_json(build_bv(secret, data, oracle, n)));
        },
        py::arg("secret"), py::arg("data_qubits"), py::arg("oracle_qubit"), py::arg("num_qubits") = 0);
    m.def("toronto_like_profile", [] { return to_py(profile_to_json(toronto_like_profile())); });

    // Simulation and metrics
    m.def(
        "run_exact",
        [](const py::object &c, const py::object &model) {
            Circuit circuit = circuit_arg(c);
            if (model.is_none()) {
                return to_py(distribution_to_json(run_exact(circuit)));
            }
            NoiseModel nm = model_arg(model);
            return to_py(distribution_to_json(run_exact(circuit, &nm)));
        },
        py::arg("circuit"), py::arg("model") = py::none());
    m.def(
        "run_shots",
        [](const py::object &c, const py::object &model, std::uint64_t shots, std::uint64_t seed) {
            NoiseModel nm = model.is_none() ? NoiseModel{} : model_arg(model);
            return to_py(counts_to_json(run_shots(circuit_arg(c), nm, shots, seed)));
        },
        py::arg("circuit"), py::arg("model"), py::arg("shots"), py::arg("seed"));
    m.def("tvd", [](const py::dict &a, const py::dict &b) { return tvd(dist_arg(a), dist_arg(b)); });
    m.def("tvd_counts", [](const py::dict &a, const py::dict &b) {
        return tvd(counts_from_json(to_json(a)), counts_from_json(to_json(b)));
    });
    m.def("tvd_error", [](const py::dict &a, const py::dict &b) {
        return tvd_error(counts_from_json(to_json(a)), counts_from_json(to_json(b)));
    });
    m.def("bv_accuracy",
          [](const py::dict &c, const std::string &secret) { return bv_accuracy(counts_from_json(to_json(c)), secret); });
    m.def("ghz_expected_rate",
          [](const py::dict &c, std::size_t n) { return ghz_expected_rate(counts_from_json(to_json(c)), n); });
    m.def("fit_exp_decay", [](const std::vector<double> &xs, const std::vector<double> &ys) {
        ExpFit f = fit_exp_decay(xs, ys);
        return py::make_tuple(f.a, f.b, f.r2);
    });

    // Virtual QPU
    py::class_<PyQpu>(m, "VirtualQpu")
        .def(py::init<const py::handle &, std::optional<std::string>>(), py::arg("profile") = "toronto-like",
             py::arg("store_dir") = py::none())
        .def("run", &PyQpu::run, py::arg("circuits"), py::arg("shots"), py::arg("seed"))
        .def("submit", &PyQpu::submit, py::arg("circuits"), py::arg("shots"), py::arg("seed"))
        .def("fetch", &PyQpu::fetch)
        .def_property_readonly("profile", &PyQpu::profile);

    // Randomized compiling
    m.def("rc_set", [](const py::object &c, std::size_t n, std::uint64_t seed) {
        json out = json::array();
        for (const auto &t : rc_set(circuit_arg(c), n, seed).circuits) {
            out.push_back(circuit_to_json(t));
        }
        return to_py(out);
    });

    // EDC
    m.def(
        "edc_characterize",
        [](PyQpu &qpu, const std::string &mode, const py::object &target, std::uint64_t shots, std::uint64_t seed) {
            SuiteMode sm = parse_suite_mode(mode);
            Topology topo = qpu.device().profile().topology;
            if (!target.is_none()) {
                topo = subtopology_for(circuit_arg(target), topo);
            }
            EDCModel model;
            auto chars = run_suite(gen_suite(topo, sm), qpu.device(), shots, seed, &model.job_ids);
            ReadoutFit rf = fit_readout(chars, sm.readout);
            model.readout = rf.readout;
            model.x_depolarizing = rf.x_depolarizing;
            model.readout_residual = rf.residual;
            model.cnot = fit_cnot_depolarizing(chars, model.readout);
            return to_py(edc_model_to_json(model));
        },
        py::arg("qpu"), py::arg("mode") = "2c-full", py::arg("target") = py::none(), py::arg("shots") = 8192,
        py::arg("seed") = 1);
    m.def(
        "refine_loop",
        [](const py::object &target, PyQpu &qpu, double threshold, int rounds, std::uint64_t shots, std::uint64_t seed) {
            RefineResult r = refine_loop(circuit_arg(target), qpu.device(), {threshold, rounds, shots, seed});
            json j = edc_model_to_json(r.model);
            j["refine"] = {{"history", r.history},
                           {"candidates", r.candidates},
                           {"refinements", r.refinements},
                           {"reached_threshold", r.reached_threshold}};
            return to_py(j);
        },
        py::arg("target"), py::arg("qpu"), py::arg("threshold") = 0.02, py::arg("max_rounds") = 8,
        py::arg("shots") = 8192, py::arg("seed") = 1);

    // KNR
    m.def(
        "knr_design",
        [](const py::object &target, std::vector<int> lengths, int randomizations, std::uint64_t shots,
           std::uint64_t seed) {
            KnrConfig cfg{std::move(lengths), randomizations, shots, seed};
            return to_py(knr_design_to_json(design_knr(per_gate_cycles(circuit_arg(target)), cfg)));
        },
        py::arg("target"), py::arg("lengths") = std::vector<int>{4, 12}, py::arg("randomizations") = 30,
        py::arg("shots") = 128, py::arg("seed") = 1);
    m.def(
        "knr_fit",
        [](const py::object &design, PyQpu &qpu, bool resolve) {
            KnrDesign d = knr_design_from_json(to_json(design));
            json out = json::array();
            for (auto r : reconstruct(estimate_fidelities(d, run_knr(d, qpu.device())), d)) {
                out.push_back(knr_result_to_json(resolve ? resolve_degeneracies(r) : r));
            }
            return to_py(out);
        },
        py::arg("design"), py::arg("qpu"), py::arg("resolve") = true);

    // GST
    m.def(
        "gst_fit",
        [](PyQpu &qpu, const std::vector<int> &qubits, std::uint64_t shots, std::uint64_t seed) {
            GateSet gs = standard_gate_set(static_cast<int>(qubits.size()));
            GstDesign d = design_gst(gs, qubits);
            GstEstimate est = gauge_fix(lgst_reconstruct(collect(d, qpu.device().run(d.circuits(), shots, seed)), gs), gs);
            return to_py(gst_estimate_to_json(est));
        },
        py::arg("qpu"), py::arg("qubits"), py::arg("shots") = 8192, py::arg("seed") = 1);
    m.def(
        "gst_simulate",
        [](const py::object &estimate, const py::object &circuit, const std::vector<int> &qubits) {
            return to_py(distribution_to_json(
                simulate_gst_model(gst_estimate_from_json(to_json(estimate)), circuit_arg(circuit), qubits)));
        },
        py::arg("estimate"), py::arg("circuit"), py::arg("qubits"));

    // Benchmarks
    m.def(
        "bench_compare",
        [](const py::object &profile, const py::dict &models, const std::string &targets, std::uint64_t shots,
           std::uint64_t seed) {
            DeviceProfile p = profile_arg(profile);
            std::vector<NamedModel> named;
            for (const auto &[k, v] : models) {
                named.push_back({k.cast<std::string>(), model_arg(v)});
            }
            BenchOptions opts;
            opts.shots = shots;
            opts.seed = seed;
            if (p.name == "toronto-like") {
                opts.ghz_mapping = toronto_ghz_mapping();
            }
            BenchmarkReport rep;
            {
                py::gil_scoped_release release;
                rep = bench_compare(p, named, parse_targets(targets), opts);
            }
            return to_py(rep.to_json());
        },
        py::arg("profile"), py::arg("models"), py::arg("targets"), py::arg("shots") = 8192, py::arg("seed") = 1);
}
