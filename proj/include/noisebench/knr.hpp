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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "noisebench/circuit.hpp"
#include "noisebench/pauli.hpp"
#include "noisebench/qpu.hpp"
#include "noisebench/simulator.hpp"

namespace noisebench {

/// A Clifford cycle to characterize, one operation per qubit.
struct CycleSpec {
    std::string id;
    Cycle cycle;

    /// Qubits touched by the cycle, ascending.
    std::vector<int> support() const;
    void validate() const;
};

/// Distinct single-gate cycles of a circuit body, in first-seen order.
std::vector<CycleSpec> per_gate_cycles(const Circuit &c);
std::vector<CycleSpec> per_gate_cycles(std::span<const Circuit> circuits);

struct KnrConfig {
    std::vector<int> lengths{4, 12};
    int randomizations = 30;
    std::uint64_t shots = 128;
    std::uint64_t seed = 1;
};

struct KnrEntry {
    std::size_t cycle = 0;
    int length = 0;
    int randomization = 0;
    /// Basis letter per support qubit (X, Y or Z).
    std::string basis;
    /// Noiseless outcome on the support qubits.
    std::string reference;
    Circuit circuit;
};

struct KnrDesign {
    KnrConfig config;
    std::vector<CycleSpec> cycles;
    std::vector<KnrEntry> entries;

    std::vector<Circuit> circuits() const;
};

/// Number of measurement bases for a cycle: 3 to the largest gate arity.
std::size_t knr_basis_count(const CycleSpec &c);

/// For each (cycle, length, randomization, basis): basis preparation, `length` repetitions of
/// random Pauli layer then cycle, a final random Pauli layer, basis unrotation, measurement.
KnrDesign design_knr(const std::vector<CycleSpec> &cycles, const KnrConfig &config);

struct DecayFit {
    double a = 0.0;
    double f = 0.0;
    double residual = 0.0;
    /// Bootstrap standard deviation of f over randomizations.
    double sigma = 0.0;
    bool reliable = true;
};

/// Fits for one gate of one cycle, on the gate's own qubits.
struct GateFit {
    Gate gate;
    std::map<PauliString, DecayFit> raw;
    /// Geometric mean of the raw fidelities over each orbit under conjugation by the gate.
    std::map<PauliString, double> fidelities;
};

struct CycleFit {
    std::string cycle_id;
    std::vector<GateFit> gates;
    /// Largest |f(P1 P2) - f(P1) f(P2)| over measured products across gates.
    double cross_gate_residual = 0.0;
};

std::vector<CycleFit> estimate_fidelities(const KnrDesign &design, const std::vector<Counts> &counts,
                                          int bootstrap = 200);
/// Exact-statistics variant.
std::vector<CycleFit> estimate_fidelities(const KnrDesign &design, const std::vector<Distribution> &dists);

struct KnrResult {
    std::string cycle_id;
    std::vector<int> support;
    /// Channel on the support, tensor of the per-gate channels in gate order.
    PauliChannel channel;
    std::vector<PauliChannel> gate_channels;
    std::vector<Gate> gates;
    std::vector<std::string> annotations;
    double total_error = 0.0;
    double cross_gate_residual = 0.0;
    bool residual_flagged = false;
};

KnrResult reconstruct(const CycleFit &fit, const CycleSpec &cycle);
std::vector<KnrResult> reconstruct(const std::vector<CycleFit> &fits, const KnrDesign &design);

/// Orbits of the gate's local Paulis under conjugation by the gate.
std::vector<std::vector<PauliString>> degeneracy_classes(const Gate &gate);
/// Moves each orbit's total rate onto its weight-one member (lexicographically first when
/// several or none) and annotates each move, e.g. "IY+ZY -> IY".
KnrResult resolve_degeneracies(const KnrResult &r);
PauliChannel resolve_degeneracies(const PauliChannel &c, const Gate &local_gate,
                                  std::vector<std::string> *annotations = nullptr);

/// Two-qubit channel: mean over the two qubits of the summed weight-one rates on each.
double depolarizing_summary(const PauliChannel &c);
double depolarizing_summary(const KnrResult &r);

/// Runs the design on the device, batching through its job limits.
std::vector<Counts> run_knr(const KnrDesign &design, VirtualQpu &qpu);

nlohmann::json knr_design_to_json(const KnrDesign &d);
KnrDesign knr_design_from_json(const nlohmann::json &j);
nlohmann::json knr_result_to_json(const KnrResult &r);

}  // namespace noisebench
