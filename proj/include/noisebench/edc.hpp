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
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "noisebench/circuit.hpp"
#include "noisebench/noise_model.hpp"
#include "noisebench/qpu.hpp"
#include "noisebench/simulator.hpp"

namespace noisebench {

enum class ReadoutMode { TwoCircuit, ThreeCircuit };
enum class LayerMode { Full, PerQubit };
enum class BellCoverage { Forward, Both };

struct SuiteMode {
    ReadoutMode readout = ReadoutMode::TwoCircuit;
    LayerMode layer = LayerMode::Full;
    BellCoverage bells = BellCoverage::Both;
};

/// Parses "2c-full", "3c-perqubit" and so on.
SuiteMode parse_suite_mode(const std::string &text);
std::string suite_mode_name(const SuiteMode &m);

enum class TestKind { Blank, XLayer, XXLayer, Bell };

struct TestCircuit {
    TestKind kind = TestKind::Blank;
    /// The isolated qubit for per-qubit layers, -1 otherwise.
    int qubit = -1;
    std::pair<int, int> coupling{-1, -1};
    Circuit circuit;
};

struct TestSuite {
    SuiteMode mode;
    std::vector<TestCircuit> tests;
};

struct Characterization {
    TestCircuit test;
    Counts counts;
};

/// Blank and X (plus XX for 3C) readout circuits, then Bell tests per coupling.
TestSuite gen_suite(const Topology &topology, const SuiteMode &mode);

/// Nodes touched by `c`, with its CNOT couplings in both orientations when the device has them.
Topology subtopology_for(const Circuit &c, const Topology &device);

struct ReadoutFit {
    std::map<int, ReadoutError> readout;
    /// 3C only: X-gate depolarizing per qubit.
    std::map<int, DepolarizingParams> x_depolarizing;
    std::map<int, double> residual;
    std::map<int, double> sigma;
    /// Qubits whose 3C solve did not converge and kept 2C values.
    std::vector<int> fell_back;
};

ReadoutFit fit_readout(const std::vector<Characterization> &chars, ReadoutMode mode);

struct CnotFit {
    double p = 0.0;
    double residual = 0.0;
    /// One-sigma bound from the least-squares curvature with binomial variances.
    double sigma = 0.0;
    bool degenerate = false;
};

/// Bell outcome model for depolarizing p on both qubits, composed with readout confusion.
std::map<std::string, double> bell_model(double p, const ReadoutError &control, const ReadoutError &target);

std::map<std::pair<int, int>, CnotFit> fit_cnot_depolarizing(const std::vector<Characterization> &chars,
                                                             const std::map<int, ReadoutError> &readout);

struct EDCModel {
    std::map<int, ReadoutError> readout;
    std::map<int, DepolarizingParams> x_depolarizing;
    std::map<std::pair<int, int>, CnotFit> cnot;
    std::map<int, double> readout_residual;
    /// Apply the X-gate depolarizing strength to every single-qubit gate.
    bool single_qubit_depolarizing = false;
    std::vector<std::string> job_ids;
};

/// Builds the simulator model. A coupling fitted in one orientation only covers both.
/// With a target, throws ValidationError listing CNOTs no fit covers.
NoiseModel compose_model(const EDCModel &m, const Circuit *target = nullptr);

struct RefineResult {
    EDCModel model;
    NoiseModel noise;
    /// TVD of the accepted model after each round; non-increasing.
    std::vector<double> history;
    /// TVD of each round's candidate before acceptance.
    std::vector<double> candidates;
    std::vector<std::string> refinements;
    bool reached_threshold = false;
};

struct RefineOptions {
    double threshold = 0.02;
    int max_rounds = 8;
    std::uint64_t shots = 8192;
    std::uint64_t seed = 1;
};

/// Characterize, fit, simulate the target and compare; refine until the TVD threshold.
RefineResult refine_loop(const Circuit &target, VirtualQpu &qpu, const RefineOptions &opts);

/// Runs a suite on the device and pairs results with tests.
std::vector<Characterization> run_suite(const TestSuite &suite, VirtualQpu &qpu, std::uint64_t shots,
                                        std::uint64_t seed, std::vector<std::string> *job_ids = nullptr);

nlohmann::json edc_model_to_json(const EDCModel &m);
EDCModel edc_model_from_json(const nlohmann::json &j);

}  // namespace noisebench
