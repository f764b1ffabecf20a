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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "noisebench/bench.hpp"
#include "noisebench/edc.hpp"
#include "noisebench/error.hpp"
#include "noisebench/gst.hpp"
#include "noisebench/knr.hpp"
#include "noisebench/rc.hpp"
#include "noisebench/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace noisebench;

namespace {

DeviceProfile profile_arg(const std::string &p) {
    if (p == "toronto-like") {
        return toronto_like_profile();
    }
    return load_profile(p);
}

// A single circuit object or an array of them.
std::vector<Circuit> read_circuits(const std::string &path) {
    json j = read_json_file(path);
    std::vector<Circuit> out;
    if (j.is_array()) {
        for (const auto &c : j) {
            out.push_back(circuit_from_json(c));
        }
    } else {
        out.push_back(circuit_from_json(j));
    }
    return out;
}

void emit(const json &j, const std::string &out) {
    if (out.empty() || out == "-") {
        std::cout << j.dump(1) << "\n";
    } else {
        write_json_file(out, j);
    }
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream f(path);
    if (!f) {
        throw Error("cannot write " + path.string());
    }
    f << text;
}

NoiseModel model_arg(const std::string &path) {
    json j = read_json_file(path);
    if (j.contains("cnot")) {
        return compose_model(edc_model_from_json(j));
    }
    return noise_model_from_json(j);
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Noise characterization and benchmarking against a virtual QPU"};
    app.require_subcommand(1);

    // qpu
    auto *qpu = app.add_subcommand("qpu", "Submit circuits to or fetch jobs from a virtual QPU");
    qpu->require_subcommand(1);
    std::string profile = "toronto-like", store = "jobs", out;
    std::uint64_t shots = 8192, seed = 1;
    std::string circuits_file, job_id;
    auto *submit = qpu->add_subcommand("submit", "Run circuits and store job records");
    submit->add_option("--profile", profile, "Profile JSON or 'toronto-like'");
    submit->add_option("--shots", shots)->capture_default_str();
    submit->add_option("--seed", seed)->capture_default_str();
    submit->add_option("--store", store, "Job store directory")->capture_default_str();
    submit->add_option("circuits", circuits_file, "Circuit JSON (object or array)")->required();
    auto *fetch = qpu->add_subcommand("fetch", "Print a stored job record");
    fetch->add_option("--store", store)->capture_default_str();
    fetch->add_option("--out", out);
    fetch->add_option("id", job_id)->required();

    // rc
    auto *rc = app.add_subcommand("rc", "Randomized compiling");
    rc->require_subcommand(1);
    std::size_t rc_n = 32;
    std::string in_file, out_dir;
    auto *compile = rc->add_subcommand("compile", "Write N twirled copies and a manifest");
    compile->add_option("--n", rc_n)->capture_default_str();
    compile->add_option("--seed", seed)->capture_default_str();
    compile->add_option("input", in_file)->required();
    compile->add_option("out_dir", out_dir)->required();

    // edc
    auto *edc = app.add_subcommand("edc", "Empirical direct characterization");
    edc->require_subcommand(1);
    std::string mode = "2c-full", target_file;
    bool refine = false;
    double threshold = 0.02;
    auto *characterize = edc->add_subcommand("characterize", "Fit readout and CNOT depolarizing parameters");
    characterize->add_option("--profile", profile);
    characterize->add_option("--mode", mode, "2c-full, 2c-perqubit, 3c-full or 3c-perqubit")->capture_default_str();
    characterize->add_option("--target", target_file, "Restrict to the qubits and couplings of this circuit");
    characterize->add_flag("--refine", refine, "Run the refinement loop against --target");
    characterize->add_option("--threshold", threshold)->capture_default_str();
    characterize->add_option("--shots", shots)->capture_default_str();
    characterize->add_option("--seed", seed)->capture_default_str();
    characterize->add_option("--out", out);

    // knr
    auto *knr = app.add_subcommand("knr", "Per-cycle Pauli noise reconstruction");
    knr->require_subcommand(1);
    KnrConfig kcfg;
    std::string design_file;
    auto *kdesign = knr->add_subcommand("design", "Build sequences for the per-gate cycles of a circuit");
    kdesign->add_option("--lengths", kcfg.lengths)->delimiter(',')->capture_default_str();
    kdesign->add_option("--randomizations", kcfg.randomizations)->capture_default_str();
    kdesign->add_option("--shots", kcfg.shots)->capture_default_str();
    kdesign->add_option("--seed", kcfg.seed)->capture_default_str();
    kdesign->add_option("--out", out);
    kdesign->add_option("target", target_file)->required();
    auto *kfit = knr->add_subcommand("fit", "Run a design on the device and reconstruct");
    kfit->add_option("--profile", profile);
    kfit->add_option("--design", design_file)->required();
    kfit->add_flag("--resolve", refine, "Resolve degeneracies onto weight-one errors");
    kfit->add_option("--out", out);

    // gst
    auto *gst = app.add_subcommand("gst", "Linear-inversion gate set tomography");
    gst->require_subcommand(1);
    std::vector<int> qubits{0};
    auto *gdesign = gst->add_subcommand("design", "Fiducial-sandwiched sequences for the standard gate set");
    gdesign->add_option("--qubits", qubits)->delimiter(',')->capture_default_str();
    gdesign->add_option("--out", out);
    auto *gfit = gst->add_subcommand("fit", "Run a design on the device, reconstruct and gauge fix");
    gfit->add_option("--profile", profile);
    gfit->add_option("--design", design_file)->required();
    gfit->add_option("--shots", shots)->capture_default_str();
    gfit->add_option("--seed", seed)->capture_default_str();
    gfit->add_option("--out", out);

    // bench
    auto *bench = app.add_subcommand("bench", "Compare noise models against the device");
    bench->require_subcommand(1);
    std::vector<std::string> model_files;
    std::string targets = "ghz:2-10,bv:all,bell";
    std::vector<int> trim;
    auto *brun = bench->add_subcommand("run", "Write report.csv and report.json");
    brun->add_option("--profile", profile);
    brun->add_option("--models", model_files, "EDC or noise model JSON files")->delimiter(',');
    brun->add_option("--targets", targets)->capture_default_str();
    brun->add_option("--shots", shots)->capture_default_str();
    brun->add_option("--seed", seed)->capture_default_str();
    brun->add_option("--trim", trim, "Marginalize GHZ counts to these positions")->delimiter(',');
    brun->add_option("--out", out_dir, "Report directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (submit->parsed()) {
            VirtualQpu dev(profile_arg(profile), store);
            for (const auto &job : dev.submit(read_circuits(circuits_file), shots, seed)) {
                std::cout << job.id << "\n";
            }
        } else if (fetch->parsed()) {
            emit(job_to_json(JobStore(store).load(job_id)), out);
        } else if (compile->parsed()) {
            Circuit base = circuit_from_json(read_json_file(in_file));
            RCSet set = rc_set(base, rc_n, seed);
            fs::create_directories(out_dir);
            std::vector<std::string> files;
            for (std::size_t i = 0; i < set.circuits.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof name, "rc-%03zu.json", i);
                files.push_back(name);
                write_json_file((fs::path(out_dir) / name).string(), circuit_to_json(set.circuits[i]));
            }
            write_json_file((fs::path(out_dir) / "base.json").string(), circuit_to_json(base));
            write_json_file((fs::path(out_dir) / "manifest.json").string(), rc_manifest(set, files, "base.json"));
            std::cout << "wrote " << files.size() << " circuits to " << out_dir << "\n";
        } else if (characterize->parsed()) {
            VirtualQpu dev(profile_arg(profile));
            if (refine) {
                if (target_file.empty()) {
                    throw ValidationError("--refine needs --target");
                }
                RefineResult r = refine_loop(read_circuits(target_file).at(0), dev, {threshold, 8, shots, seed});
                json j = edc_model_to_json(r.model);
                j["refine"] = {{"history", r.history},
                               {"candidates", r.candidates},
                               {"refinements", r.refinements},
                               {"reached_threshold", r.reached_threshold}};
                emit(j, out);
            } else {
                SuiteMode m = parse_suite_mode(mode);
                Topology topo = dev.profile().topology;
                std::optional<Circuit> target;
                if (!target_file.empty()) {
                    target = read_circuits(target_file).at(0);
                    topo = subtopology_for(*target, topo);
                }
                EDCModel model;
                auto chars = run_suite(gen_suite(topo, m), dev, shots, seed, &model.job_ids);
                ReadoutFit rf = fit_readout(chars, m.readout);
                model.readout = rf.readout;
                model.x_depolarizing = rf.x_depolarizing;
                model.readout_residual = rf.residual;
                model.cnot = fit_cnot_depolarizing(chars, model.readout);
                if (target) {
                    compose_model(model, &*target);
                }
                emit(edc_model_to_json(model), out);
            }
        } else if (kdesign->parsed()) {
            KnrDesign d = design_knr(per_gate_cycles(std::span<const Circuit>(read_circuits(target_file))), kcfg);
            emit(knr_design_to_json(d), out);
        } else if (kfit->parsed()) {
            KnrDesign d = knr_design_from_json(read_json_file(design_file));
            VirtualQpu dev(profile_arg(profile));
            json results = json::array();
            for (auto r : reconstruct(estimate_fidelities(d, run_knr(d, dev)), d)) {
                if (refine) {
                    r = resolve_degeneracies(r);
                }
                results.push_back(knr_result_to_json(r));
            }
            emit(results, out);
        } else if (gdesign->parsed()) {
            GateSet gs = standard_gate_set(static_cast<int>(qubits.size()));
            emit(gst_design_to_json(design_gst(gs, qubits)), out);
        } else if (gfit->parsed()) {
            GstDesign d = gst_design_from_json(read_json_file(design_file));
            VirtualQpu dev(profile_arg(profile));
            GstDataset ds = collect(d, dev.run(d.circuits(), shots, seed));
            GstEstimate est = gauge_fix(lgst_reconstruct(ds, d.gate_set), d.gate_set);
            json j = gst_estimate_to_json(est);
            j["spam_measured"] = json::array();
            Eigen::MatrixXd s = spam_matrix(dev.run(spam_circuits(d.qubits), shots,
                                                    derive_seed(seed, 1)));
            for (Eigen::Index r = 0; r < s.rows(); ++r) {
                std::vector<double> row(s.cols());
                for (Eigen::Index c = 0; c < s.cols(); ++c) {
                    row[c] = s(r, c);
                }
                j["spam_measured"].push_back(row);
            }
            emit(j, out);
        } else if (brun->parsed()) {
            DeviceProfile p = profile_arg(profile);
            std::vector<NamedModel> models;
            for (const auto &f : model_files) {
                models.push_back({fs::path(f).stem().string(), model_arg(f)});
            }
            BenchOptions opts;
            opts.shots = shots;
            opts.seed = seed;
            opts.trim = trim;
            if (p.name == "toronto-like") {
                opts.ghz_mapping = toronto_ghz_mapping();
            }
            BenchmarkReport rep = bench_compare(p, models, parse_targets(targets), opts);
            fs::create_directories(out_dir);
            write_text(fs::path(out_dir) / "report.csv", rep.to_csv());
            write_json_file((fs::path(out_dir) / "report.json").string(), rep.to_json());
            for (const auto &f : rep.fits) {
                std::cout << f.model << ": " << f.fit.format() << "\n";
            }
            for (const auto &g : rep.coverage_gaps) {
                std::cerr << "coverage gap: " << g << "\n";
            }
            return rep.coverage_gaps.empty() ? 0 : 2;
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
