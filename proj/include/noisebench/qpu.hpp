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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "noisebench/circuit.hpp"
#include "noisebench/noise_model.hpp"
#include "noisebench/simulator.hpp"

namespace noisebench {

/// A simulated device: topology plus the ground-truth noise it injects.
struct DeviceProfile {
    std::string name;
    Topology topology;
    NoiseModel noise;
    std::uint64_t seed = 0;
    bool synthetic = true;

    /// Every edge needs a CNOT channel and every node a readout entry.
    void validate() const;
};

DeviceProfile profile_from_json(const nlohmann::json &j);
nlohmann::json profile_to_json(const DeviceProfile &p);
DeviceProfile load_profile(const std::string &path);
/// The bundled synthetic 27-qubit profile.
DeviceProfile toronto_like_profile();

struct JobRecord {
    std::string id;
    std::string profile_name;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    /// Index of this job's first circuit within its submission.
    std::size_t first_index = 0;
    std::vector<Circuit> circuits;
    std::vector<Counts> results;
    std::string submitted_at;
    std::string finished_at;
};

nlohmann::json job_to_json(const JobRecord &r);
JobRecord job_from_json(const nlohmann::json &j);

/// Job records as one JSON file per job in a directory, or in memory when no directory is given.
class JobStore {
   public:
    JobStore() = default;
    explicit JobStore(std::string directory);

    std::string next_id();
    void save(const JobRecord &r);
    JobRecord load(const std::string &id) const;
    std::vector<std::string> ids() const;

   private:
    std::optional<std::string> dir_;
    std::map<std::string, JobRecord> memory_;
    std::uint64_t counter_ = 0;
};

class VirtualQpu {
   public:
    static constexpr std::size_t kMaxCircuitsPerJob = 900;
    static constexpr std::uint64_t kMaxShots = 8192;

    explicit VirtualQpu(DeviceProfile profile, std::optional<std::string> store_dir = std::nullopt);

    /// Splits into jobs of at most 900 circuits; circuit i uses seed derive_seed(seed, i).
    std::vector<JobRecord> submit(const std::vector<Circuit> &circuits, std::uint64_t shots, std::uint64_t seed);
    JobRecord fetch(const std::string &id) const;

    /// Counts for every circuit in submission order.
    std::vector<Counts> run(const std::vector<Circuit> &circuits, std::uint64_t shots, std::uint64_t seed);

    /// Adds rate * (job ordinal) to every readout p0 and p1; off by default.
    void enable_readout_drift(double rate_per_job);

    const DeviceProfile &profile() const {
        return profile_;
    }
    /// Rejects gates off the device or CNOTs on non-edges.
    void check_circuit(const Circuit &c) const;

   private:
    NoiseModel noise_for_job(std::uint64_t ordinal) const;

    DeviceProfile profile_;
    JobStore store_;
    double drift_rate_ = 0.0;
    std::uint64_t jobs_run_ = 0;
};

}  // namespace noisebench
