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

#include "noisebench/gst.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "noisebench/error.hpp"
#include "noisebench/metrics.hpp"

namespace noisebench {
namespace {

using Eigen::MatrixXd;

double worst_gate_error(const GstEstimate &e, const std::map<std::string, MatrixXd> &ref) {
    double w = 0;
    for (const auto &[label, m] : ref) {
        w = std::max(w, (e.gates.at(label) - m).norm());
    }
    return w;
}

NoiseModel one_qubit_depolarizing(double p) {
    NoiseModel m;
    for (GateKind k : {GateKind::RX90, GateKind::RY90, GateKind::RZ90, GateKind::I}) {
        m.set_channel({k, {0}}, DepolarizingParams{p, {}});
    }
    return m;
}

TEST(GateSet, StandardSets) {
    GateSet one = standard_gate_set(1);
    EXPECT_EQ(one.gates.size(), 5u);
    EXPECT_EQ(one.fiducials.size(), 6u);
    EXPECT_NO_THROW(one.validate());
    GateSet two = standard_gate_set(2);
    EXPECT_EQ(two.gates.size(), 10u);
    EXPECT_EQ(two.fiducials.size(), 36u);
    EXPECT_EQ(two.gates.back().label, "CNOT:0,1");
    EXPECT_THROW(standard_gate_set(3), ValidationError);
}

TEST(GateSet, IdealPtmsAgainstRotations) {
    // RX90 maps Y -> Z and Z -> -Y; RZ90 maps X -> Y.
    MatrixXd rx = ideal_ptm({Gate::make(GateKind::RX90, {0})}, 1);
    EXPECT_NEAR(rx(3, 2), 1.0, 1e-12);
    EXPECT_NEAR(rx(2, 3), -1.0, 1e-12);
    EXPECT_NEAR(rx(1, 1), 1.0, 1e-12);
    MatrixXd rz = ideal_ptm({Gate::make(GateKind::RZ90, {0})}, 1);
    EXPECT_NEAR(rz(2, 1), 1.0, 1e-12);
    MatrixXd four = ideal_ptm(std::vector<Gate>(4, Gate::make(GateKind::RY90, {0})), 1);
    EXPECT_NEAR((four - MatrixXd::Identity(4, 4)).norm(), 0.0, 1e-12);
}

TEST(GateSet, IncompleteFiducialsRejected) {
    GateSet gs = standard_gate_set(1);
    gs.fiducials = {{}, {Gate::make(GateKind::RX90, {0})}};
    gs.fiducial_labels = {"{}", "X90"};
    try {
        gs.validate();
        FAIL() << "expected ValidationError";
    } catch (const ValidationError &e) {
        EXPECT_NE(std::string(e.what()).find("missing direction"), std::string::npos) << e.what();
    }
}

TEST(Design, Counts) {
    GstDesign d = design_gst(standard_gate_set(1), {3});
    EXPECT_EQ(d.entries.size(), 6u * 6u * 5u + 6u);
    // Empty gate with empty fiducials is a bare measurement.
    EXPECT_EQ(d.entries[0].circuit.body().size(), 0u);
    EXPECT_EQ(d.entries[0].circuit.measured, std::vector<int>{3});
    GstDesign d2 = design_gst(standard_gate_set(2), {4, 7});
    EXPECT_EQ(d2.entries.size(), 36u * 36u * 10u + 36u);
    EXPECT_THROW(design_gst(standard_gate_set(2), {4}), ValidationError);
}

TEST(Design, JsonRoundTrip) {
    GstDesign d = design_gst(standard_gate_set(1), {2});
    GstDesign back = gst_design_from_json(gst_design_to_json(d));
    ASSERT_EQ(back.entries.size(), d.entries.size());
    EXPECT_EQ(back.entries[100].circuit, d.entries[100].circuit);
}

TEST(Collect, NoiselessAndMissing) {
    GstDesign d = design_gst(standard_gate_set(1), {0});
    GstDataset ds = synthetic_dataset(d, NoiseModel{}, 1024, 5);
    EXPECT_EQ(ds.shots, 1024u);
    // F = {}, G = I: outcome 0 always.
    EXPECT_EQ(ds.m.at({0, 0, 4})[0], 1.0);
    std::vector<Counts> counts;
    for (const auto &e : d.entries) {
        counts.push_back(sample_counts(run_exact(e.circuit), 1024, 1));
    }
    EXPECT_EQ(collect(d, counts).m, collect(d, counts).m);
    counts.pop_back();
    EXPECT_THROW(collect(d, counts), ValidationError);
    ds.m.erase({1, 2, 3});
    try {
        lgst_reconstruct(ds, standard_gate_set(1));
        FAIL() << "expected ValidationError";
    } catch (const ValidationError &e) {
        EXPECT_NE(std::string(e.what()).find("(1,2,3)"), std::string::npos) << e.what();
    }
}

TEST(Lgst, NoiselessRecovery) {
    GateSet gs = standard_gate_set(1);
    GstEstimate est = gauge_fix(lgst_reconstruct(synthetic_dataset(design_gst(gs, {0}), NoiseModel{}, 0, 1), gs), gs);
    EXPECT_LE(worst_gate_error(est, ideal_estimate(gs).gates), 1e-9);
    EXPECT_TRUE(est.gauge_converged);
    EXPECT_NEAR((spam_matrix(est) - MatrixXd::Identity(2, 2)).norm(), 0.0, 1e-9);
}

TEST(Lgst, DepolarizedGates) {
    GateSet gs = standard_gate_set(1);
    GstDesign d = design_gst(gs, {0});
    NoiseModel noise = one_qubit_depolarizing(0.01);
    MatrixXd dep = ptm_of_pauli_channel(depolarizing_to_pauli({0.01, {0}})).matrix;
    std::map<std::string, MatrixXd> expected;
    for (const auto &g : gs.gates) {
        expected[g.label] = g.ops.empty() ? MatrixXd::Identity(4, 4) : MatrixXd(dep * ideal_ptm(g.ops, 1));
    }
    GstEstimate exact = gauge_fix(lgst_reconstruct(synthetic_dataset(d, noise, 0, 1), gs), gs);
    EXPECT_LE(worst_gate_error(exact, expected), 1e-9);
    GstEstimate sampled = gauge_fix(lgst_reconstruct(synthetic_dataset(d, noise, 100000, 2), gs), gs);
    EXPECT_LE(worst_gate_error(sampled, expected), 1e-2);
    // Trace preservation: first row (1, 0, 0, 0) up to shot noise.
    for (const auto &[label, m] : sampled.gates) {
        EXPECT_NEAR(m(0, 0), 1.0, 3 * 0.01) << label;
        EXPECT_NEAR(m.row(0).tail(3).norm(), 0.0, 3 * 0.01) << label;
    }
}

TEST(Lgst, SingularGramAborts) {
    GateSet gs = standard_gate_set(1);
    GstDataset ds = synthetic_dataset(design_gst(gs, {0}), NoiseModel{}, 0, 1);
    for (auto &[key, v] : ds.m) {
        v = {1.0, 0.0};
    }
    EXPECT_THROW(lgst_reconstruct(ds, gs), ValidationError);
}

TEST(GaugeFix, RotatedFrame) {
    GateSet gs = standard_gate_set(1);
    GstEstimate ideal = ideal_estimate(gs);
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    MatrixXd t = MatrixXd::Identity(4, 4);
    for (Eigen::Index i = 0; i < 16; ++i) {
        t(i / 4, i % 4) += u(gen);
    }
    GstEstimate rotated = ideal;
    for (auto &[label, m] : rotated.gates) {
        m = t.inverse() * m * t;
    }
    rotated.rho = t.inverse() * ideal.rho;
    rotated.effects = ideal.effects * t;
    GstEstimate fixed = gauge_fix(rotated, gs);
    EXPECT_TRUE(fixed.gauge_converged);
    EXPECT_LT(fixed.gauge_residual, 1e-8);
    EXPECT_LE(worst_gate_error(fixed, ideal.gates), 1e-8);

    GstEstimate same = gauge_fix(ideal, gs);
    EXPECT_NEAR((same.gauge - MatrixXd::Identity(4, 4)).norm(), 0.0, 1e-12);
}

TEST(GaugeFix, IterationCapFlags) {
    GateSet gs = standard_gate_set(1);
    GstEstimate raw = lgst_reconstruct(synthetic_dataset(design_gst(gs, {0}), one_qubit_depolarizing(0.02), 0, 1), gs);
    GaugeOptions opts;
    opts.max_iterations = 1;
    GstEstimate capped = gauge_fix(raw, gs, opts);
    EXPECT_FALSE(capped.gauge_converged);
    EXPECT_EQ(capped.gates.at("RX90:0"), raw.gates.at("RX90:0"));
}

TEST(Spam, FromCounts) {
    NoiseModel m;
    m.set_readout(0, {0.02, 0.02});
    m.set_readout(1, {0.02, 0.02});
    std::vector<Counts> exact;
    for (const auto &c : spam_circuits({0, 1})) {
        Distribution d = run_exact(c, &m);
        Counts counts;
        for (const auto &[k, p] : d.probs) {
            counts.counts[k] = static_cast<std::uint64_t>(std::llround(p * 1e8));
            counts.shots += counts.counts[k];
        }
        exact.push_back(counts);
    }
    MatrixXd s = spam_matrix(exact);
    MatrixXd c1(2, 2);
    c1 << 0.98, 0.02, 0.02, 0.98;
    MatrixXd kron(4, 4);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            kron.block(2 * i, 2 * j, 2, 2) = c1(i, j) * c1;
        }
    }
    EXPECT_NEAR((s - kron).norm(), 0.0, 1e-7);
    for (Eigen::Index r = 0; r < 4; ++r) {
        EXPECT_NEAR(s.row(r).sum(), 1.0, 1e-9);
    }
    std::vector<Counts> noiseless;
    for (const auto &c : spam_circuits({0, 1})) {
        noiseless.push_back(sample_counts(run_exact(c), 100, 1));
    }
    EXPECT_EQ(spam_matrix(noiseless), MatrixXd::Identity(4, 4));
}

TEST(SimulateModel, IdealBell) {
    GstEstimate ideal = ideal_estimate(standard_gate_set(2));
    Distribution d = simulate_gst_model(ideal, build_bell(3, 5, 6), {3, 5});
    EXPECT_NEAR(d.at("00"), 0.5, 1e-12);
    EXPECT_NEAR(d.at("11"), 0.5, 1e-12);
    EXPECT_THROW(simulate_gst_model(ideal, build_bell(5, 3, 6), {3, 5}), ValidationError);
    EXPECT_THROW(simulate_gst_model(ideal, build_bell(3, 4, 6), {3, 5}), ValidationError);
}

TEST(Estimate, JsonRoundTrip) {
    GateSet gs = standard_gate_set(1);
    GstEstimate e = gauge_fix(lgst_reconstruct(synthetic_dataset(design_gst(gs, {0}), one_qubit_depolarizing(0.01), 1000, 3), gs), gs);
    GstEstimate back = gst_estimate_from_json(gst_estimate_to_json(e));
    EXPECT_EQ(gst_estimate_to_json(back), gst_estimate_to_json(e));
    auto j = gst_estimate_to_json(e);
    EXPECT_EQ(j["spam"].size(), 2u);
}

}  // namespace
}  // namespace noisebench
