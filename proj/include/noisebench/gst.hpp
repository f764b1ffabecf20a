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

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "noisebench/circuit.hpp"
#include "noisebench/noise_model.hpp"
#include "noisebench/simulator.hpp"

namespace noisebench {

/// A gate of the set as a sequence of native operations on local qubits 0..n-1.
/// The empty gate has no operations.
struct GstGate {
    std::string label;
    std::vector<Gate> ops;
};

struct GateSet {
    std::size_t num_qubits = 1;
    std::vector<GstGate> gates;
    std::vector<std::vector<Gate>> fiducials;
    std::vector<std::string> fiducial_labels;

    /// Throws ValidationError naming the missing direction if the fiducials are not informationally complete.
    void validate() const;
};

/// One qubit: {}, RX90, RY90, RZ90, I. Two qubits: {}, RX90/RY90/RZ90/I on each qubit, CNOT.
/// Fiducials {}, X90, Y90, X90^2, X90^3, Y90^3 per qubit (products for two qubits).
GateSet standard_gate_set(std::size_t num_qubits);

/// PTM of a sequence of local operations, in lexicographic Pauli order.
Eigen::MatrixXd ideal_ptm(const std::vector<Gate> &ops, std::size_t num_qubits);

struct GstEntry {
    int i = 0;
    /// -1 for the fiducial-only sequences.
    int j = -1;
    int k = -1;
    Circuit circuit;
};

struct GstDesign {
    GateSet gate_set;
    /// Device qubit for each local qubit.
    std::vector<int> qubits;
    std::vector<GstEntry> entries;

    std::vector<Circuit> circuits() const;
};

/// One circuit per (i, j, k) applying F_j, G_k, F_i, then one per i applying F_i alone.
GstDesign design_gst(const GateSet &gs, const std::vector<int> &qubits);

struct GstDataset {
    std::size_t num_qubits = 1;
    std::uint64_t shots = 0;
    /// Outcome frequencies keyed by (i, j, k), with j = k = -1 for fiducial-only sequences.
    std::map<std::array<int, 3>, std::vector<double>> m;
};

GstDataset collect(const GstDesign &design, const std::vector<Counts> &counts);
/// Simulated data; shots = 0 gives exact probabilities.
GstDataset synthetic_dataset(const GstDesign &design, const NoiseModel &noise, std::uint64_t shots, std::uint64_t seed);

struct GstEstimate {
    std::size_t num_qubits = 1;
    std::map<std::string, Eigen::MatrixXd> gates;
    /// Pauli-Liouville vector r_P = Tr(P rho).
    Eigen::VectorXd rho;
    /// Row o is the effect of outcome o; p(o) = effects.row(o) * rho.
    Eigen::MatrixXd effects;
    Eigen::MatrixXd gauge;
    double condition_number = 0.0;
    double gauge_residual = 0.0;
    int gauge_iterations = 0;
    bool gauge_converged = true;
};

/// Linear inversion in the frame of the target gate set.
GstEstimate lgst_reconstruct(const GstDataset &ds, const GateSet &gs);

/// Ideal estimate for the gate set.
GstEstimate ideal_estimate(const GateSet &gs);

struct GaugeOptions {
    int max_iterations = 500;
    double tolerance = 1e-26;
};

/// Similarity transform T minimizing sum_k |T G_k T^-1 - G_k^ideal|^2 plus the SPAM distances,
/// by BFGS from T = I. Non-convergence returns the input flagged.
GstEstimate gauge_fix(const GstEstimate &raw, const GateSet &target, const GaugeOptions &opts = {});

/// Preparation circuits for every basis state (X on each 1 bit), then measurement.
std::vector<Circuit> spam_circuits(const std::vector<int> &qubits, int num_qubits = 0);
/// Row e: outcome frequencies for prepared state e. Rows sum to 1.
Eigen::MatrixXd spam_matrix(const std::vector<Counts> &counts);
/// SPAM matrix implied by an estimate, with X built from RX90 twice.
Eigen::MatrixXd spam_matrix(const GstEstimate &est);

/// Outcome distribution of `c` under the estimate. Supports H, X, I, RX90, RY90, RZ90, PAULI and CNOT.
Distribution simulate_gst_model(const GstEstimate &est, const Circuit &c, const std::vector<int> &qubits);

nlohmann::json gst_design_to_json(const GstDesign &d);
GstDesign gst_design_from_json(const nlohmann::json &j);
nlohmann::json gst_estimate_to_json(const GstEstimate &e);
GstEstimate gst_estimate_from_json(const nlohmann::json &j);

}  // namespace noisebench
