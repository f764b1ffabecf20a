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

#include "noisebench/qpu.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "embedded_data.hpp"
#include "noisebench/error.hpp"
#include "noisebench/parallel.hpp"
#include "noisebench/rng.hpp"

namespace noisebench {

using json = nlohmann::json;
namespace fs = std::filesystem;

void DeviceProfile::validate() const {
    topology.validate();
    for (const auto &[c, t] : topology.edges) {
        if (!noise.channel({GateKind::CNOT, {c, t}})) {
            throw ValidationError("profile " + name + ": no CNOT channel for edge (" + std::to_string(c) + "," +
                                  std::to_string(t) + ")");
        }
    }
    for (int q : topology.nodes) {
        if (!noise.readouts().count(q)) {
            throw ValidationError("profile " + name + ": no readout error for qubit " + std::to_string(q));
        }
    }
}

DeviceProfile profile_from_json(const json &j) {
    DeviceProfile p;
    try {
        p.name = j.at("name").get<std::string>();
        p.topology = topology_from_json(j.at("topology"));
        p.noise = noise_model_from_json(j.at("noise"));
        p.seed = j.value("seed", std::uint64_t{0});
        p.synthetic = j.value("synthetic", true);
    } catch (const json::exception &e) {
        throw ValidationError(std::string("profile: ") + e.what());
    }
    p.validate();
    return p;
}

json profile_to_json(const DeviceProfile &p) {
    return {{"name", p.name},
            {"synthetic", p.synthetic},
            {"seed", p.seed},
            {"topology", topology_to_json(p.topology)},
            {"noise", noise_model_to_json(p.noise)}};
}

DeviceProfile load_profile(const std::string &path) {
    return profile_from_json(read_json_file(path));
}

DeviceProfile toronto_like_profile() {
    return profile_from_json(json::parse(data::kTorontoLikeProfile));
}

json job_to_json(const JobRecord &r) {
    json circuits = json::array();
    for (const auto &c : r.circuits) {
        circuits.push_back(circuit_to_json(c));
    }
    json results = json::array();
    for (const auto &c : r.results) {
        results.push_back(counts_to_json(c));
    }
    return {{"id", r.id},
            {"profile", r.profile_name},
            {"shots", r.shots},
            {"seed", r.seed},
            {"first_index", r.first_index},
            {"submitted_at", r.submitted_at},
            {"finished_at", r.finished_at},
            {"circuits", circuits},
            {"results", results}};
}

JobRecord job_from_json(const json &j) {
    JobRecord r;
    r.id = j.at("id").get<std::string>();
    r.profile_name = j.at("profile").get<std::string>();
    r.shots = j.at("shots").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.first_index = j.at("first_index").get<std::size_t>();
    r.submitted_at = j.at("submitted_at").get<std::string>();
    r.finished_at = j.at("finished_at").get<std::string>();
    for (const auto &c : j.at("circuits")) {
        r.circuits.push_back(circuit_from_json(c));
    }
    for (const auto &c : j.at("results")) {
        r.results.push_back(counts_from_json(c));
    }
    if (r.results.size() != r.circuits.size()) {
        throw ValidationError("job " + r.id + ": result count differs from circuit count");
    }
    return r;
}

JobStore::JobStore(std::string directory) : dir_(std::move(directory)) {
    fs::create_directories(*dir_);
    for (const auto &id : ids()) {
        counter_ = std::max<std::uint64_t>(counter_, std::stoull(id.substr(4)));
    }
}

std::string JobStore::next_id() {
    std::ostringstream s;
    s << "job-" << std::setw(6) << std::setfill('0') << ++counter_;
    return s.str();
}

void JobStore::save(const JobRecord &r) {
    if (!dir_) {
        memory_[r.id] = r;
        return;
    }
    fs::path path = fs::path(*dir_) / (r.id + ".json");
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) {
            throw Error("cannot write job record " + tmp.string());
        }
        out << job_to_json(r).dump() << "\n";
    }
    fs::rename(tmp, path);
}

JobRecord JobStore::load(const std::string &id) const {
    if (!dir_) {
        auto it = memory_.find(id);
        if (it == memory_.end()) {
            throw ValidationError("unknown job id '" + id + "'");
        }
        return it->second;
    }
    fs::path path = fs::path(*dir_) / (id + ".json");
    if (!fs::exists(path)) {
        throw ValidationError("unknown job id '" + id + "'");
    }
    return job_from_json(read_json_file(path.string()));
}

std::vector<std::string> JobStore::ids() const {
    std::vector<std::string> out;
    if (!dir_) {
        for (const auto &[id, r] : memory_) {
            out.push_back(id);
        }
        return out;
    }
    for (const auto &entry : fs::directory_iterator(*dir_)) {
        std::string name = entry.path().filename().string();
        if (name.rfind("job-", 0) == 0 && entry.path().extension() == ".json") {
            out.push_back(entry.path().stem().string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::string now_iso() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

}  // namespace

VirtualQpu::VirtualQpu(DeviceProfile profile, std::optional<std::string> store_dir)
    : profile_(std::move(profile)), store_(store_dir ? JobStore(*store_dir) : JobStore()) {
    profile_.validate();
}

void VirtualQpu::enable_readout_drift(double rate_per_job) {
    drift_rate_ = rate_per_job;
}

void VirtualQpu::check_circuit(const Circuit &c) const {
    for (std::size_t ci = 0; ci < c.cycles.size(); ++ci) {
        for (const auto &g : c.cycles[ci].gates) {
            for (int q : g.qubits) {
                if (!profile_.topology.has_node(q)) {
                    throw ValidationError("cycle " + std::to_string(ci) + ": qubit " + std::to_string(q) +
                                          " is not on device " + profile_.name);
                }
            }
            if (g.kind == GateKind::CNOT && !profile_.topology.has_edge(g.qubits[0], g.qubits[1])) {
                throw ValidationError("cycle " + std::to_string(ci) + ": CNOT(" + std::to_string(g.qubits[0]) + "," +
                                      std::to_string(g.qubits[1]) + ") is not a device coupling");
            }
        }
    }
}

NoiseModel VirtualQpu::noise_for_job(std::uint64_t ordinal) const {
    NoiseModel m = profile_.noise;
    if (drift_rate_ != 0.0) {
        double shift = drift_rate_ * static_cast<double>(ordinal);
        for (const auto &[q, r] : profile_.noise.readouts()) {
            m.set_readout(q, {std::clamp(r.p0 + shift, 0.0, 1.0), std::clamp(r.p1 + shift, 0.0, 1.0)});
        }
    }
    return m;
}

std::vector<JobRecord> VirtualQpu::submit(const std::vector<Circuit> &circuits, std::uint64_t shots,
                                          std::uint64_t seed) {
    if (shots == 0 || shots > kMaxShots) {
        throw ValidationError("shots must be in [1, " + std::to_string(kMaxShots) + "], got " + std::to_string(shots));
    }
    for (const auto &c : circuits) {
        c.validate();
        check_circuit(c);
    }
    std::vector<JobRecord> jobs;
    for (std::size_t start = 0; start < circuits.size(); start += kMaxCircuitsPerJob) {
        std::size_t end = std::min(circuits.size(), start + kMaxCircuitsPerJob);
        JobRecord r;
        r.id = store_.next_id();
        r.profile_name = profile_.name;
        r.shots = shots;
        r.seed = seed;
        r.first_index = start;
        r.submitted_at = now_iso();
        r.circuits.assign(circuits.begin() + static_cast<std::ptrdiff_t>(start),
                          circuits.begin() + static_cast<std::ptrdiff_t>(end));
        r.results.resize(r.circuits.size());
        NoiseModel noise = noise_for_job(jobs_run_++);
        parallel_for(r.circuits.size(), [&](std::size_t i) {
            r.results[i] = run_shots(r.circuits[i], noise, shots, derive_seed(seed, start + i));
        });
        r.finished_at = now_iso();
        store_.save(r);
        jobs.push_back(std::move(r));
    }
    return jobs;
}

JobRecord VirtualQpu::fetch(const std::string &id) const {
    return store_.load(id);
}

std::vector<Counts> VirtualQpu::run(const std::vector<Circuit> &circuits, std::uint64_t shots, std::uint64_t seed) {
    std::vector<Counts> out;
    out.reserve(circuits.size());
    for (auto &job : submit(circuits, shots, seed)) {
        for (auto &c : job.results) {
            out.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace noisebench
