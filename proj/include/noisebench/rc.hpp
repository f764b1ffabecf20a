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
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "noisebench/circuit.hpp"
#include "noisebench/pauli.hpp"
#include "noisebench/simulator.hpp"

namespace noisebench {

struct RCSet {
    Circuit base;
    std::uint64_t seed = 0;
    std::vector<Circuit> circuits;
};

/// Wraps every hard CNOT in a random two-qubit Pauli and its conjugated correction,
/// then folds consecutive Pauli gates on each qubit between hard cycles.
Circuit twirl_once(const Circuit &c, std::uint64_t seed);
/// `n` twirls; member i uses derive_seed(seed, i).
RCSet rc_set(const Circuit &c, std::size_t n, std::uint64_t seed);
/// Elementwise sum of counts over the same register.
Counts aggregate(std::span<const Counts> results);

/// Pauli twirl of the map rho -> sum_k K rho K^dagger: rate(Q) = sum_k |Tr(Q K) / d|^2.
PauliChannel twirl_average_channel(std::span<const Eigen::MatrixXcd> kraus);
PauliChannel twirl_average_channel(const PauliChannel &c);
/// Twirl of RX(theta) applied to each of n qubits.
PauliChannel twirl_average_overrotation(double theta, std::size_t num_qubits);

nlohmann::json rc_manifest(const RCSet &set, std::span<const std::string> member_files, const std::string &base_file);

}  // namespace noisebench
