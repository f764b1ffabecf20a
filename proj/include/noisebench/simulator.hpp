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
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "noisebench/circuit.hpp"
#include "noisebench/noise_model.hpp"

namespace noisebench {

/// Outcome probabilities keyed by bitstring; character i is measured qubit i.
struct Distribution {
    std::map<std::string, double> probs;

    double at(const std::string &bits) const;
    double total() const;
    /// Throws unless probabilities are nonnegative, sum to 1 and share a length.
    void validate() const;
};

struct Counts {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;

    std::uint64_t at(const std::string &bits) const;
    Distribution normalized() const;
};

struct SimOptions {
    /// Largest qubit cluster handled by run_exact.
    int exact_max_qubits = 12;
};

/// Exact outcome distribution. Gates on disjoint qubit clusters are simulated
/// separately; each cluster must fit within the exact-mode cap.
Distribution run_exact(const Circuit &c, const NoiseModel *model = nullptr, const SimOptions &opts = {});

/// Sampled counts via Pauli trajectories; deterministic given the seed.
Counts run_shots(const Circuit &c, const NoiseModel &model, std::uint64_t shots, std::uint64_t seed,
                 const SimOptions &opts = {});

/// Independent per-bit confusion; `errors[i]` acts on character i.
Distribution apply_readout(const Distribution &d, std::span<const ReadoutError> errors);
Distribution apply_readout(const Distribution &d, const ReadoutError &r);

/// Draws `shots` samples from `d` (multinomial).
Counts sample_counts(const Distribution &d, std::uint64_t shots, std::uint64_t seed);

/// Marginal over the listed character positions.
Distribution marginal(const Distribution &d, std::span<const int> positions);
Counts marginal(const Counts &c, std::span<const int> positions);

nlohmann::json counts_to_json(const Counts &c);
Counts counts_from_json(const nlohmann::json &j);
nlohmann::json distribution_to_json(const Distribution &d);
Distribution distribution_from_json(const nlohmann::json &j);

}  // namespace noisebench
