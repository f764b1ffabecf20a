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

#include <map>
#include <optional>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "noisebench/circuit.hpp"
#include "noisebench/pauli.hpp"

namespace noisebench {

/// Noise applied after a gate; acts on the gate's qubits in gate order.
using NoiseChannel = std::variant<PauliChannel, DepolarizingParams, PTM>;

struct GateKey {
    GateKind kind = GateKind::I;
    std::vector<int> qubits;

    static GateKey of(const Gate &g) {
        return {g.kind, g.qubits};
    }
    friend auto operator<=>(const GateKey &, const GateKey &) = default;
    friend bool operator==(const GateKey &, const GateKey &) = default;
};

std::string key_str(const GateKey &k);

/// Per-gate noise: ideal gate, then RX(theta) on each gate qubit, then the channel.
/// Readout flips act on measured bits. Missing entries are noiseless.
class NoiseModel {
   public:
    void set_channel(const GateKey &key, NoiseChannel channel);
    void set_overrotation(const GateKey &key, double theta);
    void set_readout(int qubit, ReadoutError r);
    void erase_channel(const GateKey &key);

    const NoiseChannel *channel(const GateKey &key) const;
    /// Channel as a Pauli channel; nullopt when absent. Throws for PTM noise.
    std::optional<PauliChannel> pauli_channel(const GateKey &key) const;
    double overrotation(const GateKey &key) const;
    ReadoutError readout(int qubit) const;

    const std::map<GateKey, NoiseChannel> &channels() const {
        return channels_;
    }
    const std::map<GateKey, double> &overrotations() const {
        return overrotations_;
    }
    const std::map<int, ReadoutError> &readouts() const {
        return readout_;
    }

    bool has_ptm_noise() const;
    /// Gates of `kind` in `c` that have no channel assigned.
    std::vector<GateKey> uncovered(const Circuit &c, GateKind kind) const;

   private:
    std::map<GateKey, NoiseChannel> channels_;
    std::map<GateKey, double> overrotations_;
    std::map<int, ReadoutError> readout_;
};

std::size_t channel_arity(const NoiseChannel &c);
PauliChannel to_pauli_channel(const NoiseChannel &c, std::size_t arity);

nlohmann::json pauli_channel_to_json(const PauliChannel &c);
PauliChannel pauli_channel_from_json(const nlohmann::json &j);
nlohmann::json channel_to_json(const NoiseChannel &c);
NoiseChannel channel_from_json(const nlohmann::json &j);
nlohmann::json ptm_to_json(const PTM &p);
PTM ptm_from_json(const nlohmann::json &j);
nlohmann::json noise_model_to_json(const NoiseModel &m);
NoiseModel noise_model_from_json(const nlohmann::json &j);

}  // namespace noisebench
