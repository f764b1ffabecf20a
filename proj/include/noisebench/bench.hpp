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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "noisebench/circuit.hpp"
#include "noisebench/metrics.hpp"
#include "noisebench/qpu.hpp"

namespace noisebench {

struct BenchTargets {
    bool bell = false;
    /// Inclusive GHZ size range; ghz_min == 0 means none.
    int ghz_min = 0;
    int ghz_max = 0;
    std::vector<std::string> bv_secrets;
};

/// Parses "ghz:2-10,bv:all,bell". "bv:all" expands to every 3-bit secret.
BenchTargets parse_targets(const std::string &text);

struct NamedModel {
    std::string name;
    NoiseModel model;
};

struct BenchOptions {
    std::uint64_t shots = 8192;
    std::uint64_t seed = 1;
    /// Defaults to a breadth-first layout from the first node.
    std::optional<GhzMapping> ghz_mapping;
    /// Marginalize GHZ counts to these register positions.
    std::vector<int> trim;
    std::optional<std::string> store_dir;
};

struct BenchRow {
    std::string circuit;
    std::string model;
    double tvd = 0.0;
    double tvd_error = 0.0;
    std::uint64_t shots = 0;
    double runtime_ms = 0.0;
    /// GHZ expected rate or BV accuracy of this row's counts.
    double score = 0.0;
};

struct BenchFit {
    std::string model;
    ExpFit fit;
};

struct BenchmarkReport {
    std::string profile;
    std::uint64_t seed = 0;
    std::uint64_t shots = 0;
    std::vector<std::string> job_ids;
    std::vector<BenchRow> rows;
    /// Decay of the GHZ expected-outcome rate with size, per model.
    std::vector<BenchFit> fits;
    std::vector<std::string> coverage_gaps;

    const BenchRow *find(const std::string &circuit, const std::string &model) const;
    std::string to_csv() const;
    nlohmann::json to_json() const;
};

inline constexpr const char *kNoiselessBaseline = "noiseless";
inline constexpr const char *kSelfSimulation = "self-simulation";
inline constexpr const char *kExperiment = "experiment";

GhzMapping bfs_ghz_mapping(const Topology &t);

/// Named target circuits on the device register, in report order.
std::vector<std::pair<std::string, Circuit>> bench_circuits(const Topology &t, const BenchTargets &targets,
                                                            const GhzMapping &mapping);

/// Runs targets on a virtual QPU and scores each model against the results.
/// Models missing a CNOT channel on a target get a coverage gap instead of a row.
BenchmarkReport bench_compare(const DeviceProfile &profile, const std::vector<NamedModel> &models,
                              const BenchTargets &targets, const BenchOptions &opts);

}  // namespace noisebench
