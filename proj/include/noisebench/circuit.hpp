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

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "noisebench/pauli.hpp"

namespace noisebench {

enum class GateKind { H, X, I, RX90, RY90, RZ90, CNOT, MEASURE, PAULI };
enum class Hardness { Easy, Hard };

std::string_view kind_name(GateKind kind);
GateKind parse_kind(std::string_view name);
std::size_t kind_arity(GateKind kind);

struct Gate {
    GateKind kind = GateKind::I;
    std::vector<int> qubits;  // control first for CNOT
    Hardness hardness = Hardness::Easy;
    char pauli = 'I';  // the applied letter, PAULI only

    /// Builds a gate with default hardness (CNOT hard, everything else easy).
    static Gate make(GateKind kind, std::vector<int> qubits);
    static Gate pauli_gate(int qubit, char letter);

    bool is_hard() const {
        return hardness == Hardness::Hard;
    }
    friend bool operator==(const Gate &, const Gate &) = default;
};

/// One time step; gates act on pairwise-disjoint qubits.
struct Cycle {
    std::vector<Gate> gates;

    bool is_measurement() const;
    bool has_hard_gate() const;
    std::vector<int> qubits() const;
    friend bool operator==(const Cycle &, const Cycle &) = default;
};

/// Gate-level circuit. When `measured` is non-empty the last cycle is the
/// measurement cycle and holds one MEASURE per measured qubit.
struct Circuit {
    int num_qubits = 0;
    std::vector<Cycle> cycles;
    std::vector<int> measured;

    /// Appends the measurement cycle for `measured` after `body`.
    static Circuit make(int num_qubits, std::vector<Cycle> body, std::vector<int> measured);

    /// Cycles before the measurement cycle.
    std::span<const Cycle> body() const;
    std::size_t gate_count(std::optional<GateKind> kind = std::nullopt) const;
    /// Qubits touched by any non-measurement gate, ascending.
    std::vector<int> active_qubits() const;
    /// Throws ValidationError naming the offending cycle.
    void validate() const;

    friend bool operator==(const Circuit &, const Circuit &) = default;
};

struct Topology {
    std::vector<int> nodes;
    std::vector<std::pair<int, int>> edges;  // directed couplings

    bool has_node(int q) const;
    bool has_edge(int control, int target) const;
    /// Either orientation.
    bool has_coupling(int a, int b) const;
    /// One orientation per unordered pair, the first listed in `edges`.
    std::vector<std::pair<int, int>> couplings() const;
    void validate() const;
};

/// GHZ preparation layout: H on `root`, then `cnots` in order; size n uses the first n-1.
struct GhzMapping {
    int root = 0;
    std::vector<std::pair<int, int>> cnots;
};

Topology toronto_topology();
/// Nodes 0..n-1 with couplings (i, i+1) in both orientations.
Topology line_topology(int n);
GhzMapping toronto_ghz_mapping();

Circuit build_bell(int control, int target, int num_qubits = 0);
Circuit build_ghz(int n, const GhzMapping &mapping, const Topology *topology = nullptr, int num_qubits = 0);
/// secret[i] is encoded on data_qubits[i]; bitstrings read left to right.
Circuit build_bv(std::string_view secret, const std::vector<int> &data_qubits, int oracle_qubit, int num_qubits = 0);

/// Unitary of a non-measurement gate; 2x2 or 4x4 with the first listed qubit most significant.
Eigen::MatrixXcd gate_unitary(const Gate &g);
Eigen::Matrix2cd rx_matrix(double theta);

struct SignedPauli {
    PauliString pauli;
    bool negative = false;
};

bool is_clifford(GateKind kind);
/// g P g^dagger for a Clifford gate acting on the register of P.
SignedPauli conjugate(const PauliString &p, const Gate &g);
SignedPauli conjugate(const PauliString &p, const Cycle &c);

// Serialization. Field order is stable (keys sorted).
nlohmann::json circuit_to_json(const Circuit &c);
Circuit circuit_from_json(const nlohmann::json &j);
std::string serialize(const Circuit &c);
/// Throws ParseError with line and reason.
Circuit parse_circuit(std::string_view text);

nlohmann::json topology_to_json(const Topology &t);
Topology topology_from_json(const nlohmann::json &j);
nlohmann::json ghz_mapping_to_json(const GhzMapping &m);
GhzMapping ghz_mapping_from_json(const nlohmann::json &j);

/// Parses JSON text, turning syntax errors into ParseError with a line number.
nlohmann::json parse_json_text(std::string_view text);
nlohmann::json read_json_file(const std::string &path);
void write_json_file(const std::string &path, const nlohmann::json &j);

}  // namespace noisebench
