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

#include "noisebench/simulator.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "noisebench/error.hpp"

namespace noisebench {
namespace {

double tvd_of(const Distribution &a, const Distribution &b) {
    std::map<std::string, double> diff = a.probs;
    for (const auto &[k, p] : b.probs) {
        diff[k] -= p;
    }
    double s = 0;
    for (const auto &[k, d] : diff) {
        s += std::abs(d);
    }
    return s / 2;
}

// Full-register operator for `m` acting on `qubits` (qubit 0 most significant).
Eigen::MatrixXcd embed(const Eigen::MatrixXcd &m, const std::vector<int> &qubits, int n) {
    std::size_t dim = std::size_t{1} << n;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    auto bit = [n](std::size_t idx, int q) { return (idx >> (n - 1 - q)) & 1u; };
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            bool same = true;
            for (int q = 0; q < n; ++q) {
                if (std::find(qubits.begin(), qubits.end(), q) == qubits.end() && bit(r, q) != bit(c, q)) {
                    same = false;
                }
            }
            if (!same) {
                continue;
            }
            std::size_t lr = 0, lc = 0;
            for (int q : qubits) {
                lr = (lr << 1) | bit(r, q);
                lc = (lc << 1) | bit(c, q);
            }
            out(r, c) = m(lr, lc);
        }
    }
    return out;
}

// Brute-force density-matrix oracle: full 2^n matrices, Kraus sums, readout by explicit confusion.
Distribution dense_oracle(const Circuit &c, const NoiseModel &m) {
    int n = c.num_qubits;
    std::size_t dim = std::size_t{1} << n;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    rho(0, 0) = 1;
    for (const auto &cycle : c.body()) {
        for (const auto &g : cycle.gates) {
            Eigen::MatrixXcd u = embed(gate_unitary(g), g.qubits, n);
            rho = u * rho * u.adjoint();
            double theta = m.overrotation(GateKey::of(g));
            for (int q : g.qubits) {
                Eigen::MatrixXcd rx = embed(rx_matrix(theta), {q}, n);
                rho = rx * rho * rx.adjoint();
            }
            if (auto ch = m.pauli_channel(GateKey::of(g))) {
                Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(dim, dim);
                for (const auto &[p, r] : ch->rates()) {
                    Eigen::MatrixXcd pm = embed(pauli_matrix(p), g.qubits, n);
                    next += r * pm * rho * pm.adjoint();
                }
                rho = next;
            }
        }
    }
    Distribution d;
    for (std::size_t idx = 0; idx < dim; ++idx) {
        double p = rho(idx, idx).real();
        // Sum over readout outcomes of the measured bits.
        std::size_t k = c.measured.size();
        for (std::size_t out = 0; out < (std::size_t{1} << k); ++out) {
            double w = p;
            std::string s(k, '0');
            for (std::size_t b = 0; b < k; ++b) {
                int q = c.measured[b];
                bool truth = (idx >> (n - 1 - q)) & 1u;
                bool seen = (out >> b) & 1u;
                ReadoutError r = m.readout(q);
                double flip = truth ? r.p1 : r.p0;
                w *= truth == seen ? 1 - flip : flip;
                s[b] = seen ? '1' : '0';
            }
            if (w > 0) {
                d.probs[s] += w;
            }
        }
    }
    return d;
}

NoiseModel mixed_model() {
    NoiseModel m;
    m.set_channel({GateKind::CNOT, {0, 1}}, DepolarizingParams{0.04, {}});
    m.set_channel({GateKind::CNOT, {1, 2}},
                  PauliChannel(2, {{PauliString::from_str("II"), 0.9},
                                   {PauliString::from_str("XZ"), 0.05},
                                   {PauliString::from_str("YI"), 0.03},
                                   {PauliString::from_str("IY"), 0.02}}));
    m.set_channel({GateKind::H, {0}}, DepolarizingParams{0.01, {}});
    m.set_readout(0, {0.02, 0.05});
    m.set_readout(1, {0.03, 0.01});
    m.set_readout(2, {0.04, 0.06});
    return m;
}

TEST(RunExact, BellExamples) {
    Circuit bell = build_bell(0, 1);
    auto ideal = run_exact(bell);
    EXPECT_NEAR(ideal.at("00"), 0.5, 1e-12);
    EXPECT_NEAR(ideal.at("11"), 0.5, 1e-12);
    EXPECT_EQ(ideal.at("01"), 0.0);
    NoiseModel m;
    m.set_channel({GateKind::CNOT, {0, 1}}, DepolarizingParams{0.015, {}});
    auto noisy = run_exact(bell, &m);
    EXPECT_NEAR(noisy.at("00"), 0.4901, 1e-12);
    EXPECT_NEAR(noisy.at("11"), 0.4901, 1e-12);
    EXPECT_NEAR(noisy.at("01"), 0.0099, 1e-12);
    EXPECT_NEAR(noisy.at("10"), 0.0099, 1e-12);
}

TEST(RunExact, GhzIsEqualSplit) {
    auto mapping = toronto_ghz_mapping();
    for (int n = 2; n <= 12; ++n) {
        auto d = run_exact(build_ghz(n, mapping));
        EXPECT_NEAR(d.at(std::string(n, '0')), 0.5, 1e-12);
        EXPECT_NEAR(d.at(std::string(n, '1')), 0.5, 1e-12);
        d.validate();
    }
    EXPECT_THROW(run_exact(build_ghz(13, mapping)), ValidationError);
    SimOptions big{14};
    EXPECT_NO_THROW(run_exact(build_ghz(13, mapping), nullptr, big));
}

TEST(RunExact, MatchesDenseOracleUnderMixedNoise) {
    auto m = mixed_model();
    m.set_overrotation({GateKind::CNOT, {0, 1}}, 0.1);
    for (const Circuit &c : {build_bell(0, 1), build_ghz(3, toronto_ghz_mapping())}) {
        auto ours = run_exact(c, &m);
        auto oracle = dense_oracle(c, m);
        EXPECT_LT(tvd_of(ours, oracle), 1e-12);
        ours.validate();
    }
}

TEST(RunExact, OverRotationOnBell) {
    double theta = 0.15;
    NoiseModel m;
    m.set_overrotation({GateKind::CNOT, {0, 1}}, theta);
    auto d = run_exact(build_bell(0, 1), &m);
    EXPECT_NEAR(d.at("01") + d.at("10"), std::pow(std::sin(theta), 2), 1e-12);
}

TEST(RunExact, PtmNoiseEqualsPauliNoise) {
    auto chan = depolarizing_to_pauli({0.05, {0, 1}});
    NoiseModel a, b;
    a.set_channel({GateKind::CNOT, {0, 1}}, chan);
    b.set_channel({GateKind::CNOT, {0, 1}}, ptm_of_pauli_channel(chan));
    Circuit bell = build_bell(0, 1);
    EXPECT_LT(tvd_of(run_exact(bell, &a), run_exact(bell, &b)), 1e-12);
}

TEST(RunExact, ClustersOnLargeRegister) {
    std::vector<Cycle> body{Cycle{}};
    std::vector<int> all;
    for (int q = 0; q < 27; ++q) {
        body[0].gates.push_back(Gate::make(GateKind::X, {q}));
        all.push_back(q);
    }
    auto d = run_exact(Circuit::make(27, body, all));
    EXPECT_NEAR(d.at(std::string(27, '1')), 1.0, 1e-12);
    auto bell = run_exact(build_bell(25, 22));
    EXPECT_NEAR(bell.at("11"), 0.5, 1e-12);
}

TEST(RunExact, BvNoiselessReturnsSecret) {
    for (int s = 0; s < 8; ++s) {
        std::string secret;
        for (int b = 0; b < 3; ++b) {
            secret += ((s >> b) & 1) ? '1' : '0';
        }
        auto d = run_exact(build_bv(secret, {22, 24, 26}, 25));
        EXPECT_NEAR(d.at(secret), 1.0, 1e-12) << secret;
    }
}

TEST(ApplyReadout, Examples) {
    Distribution zero{{{"0", 1.0}}};
    Distribution one{{{"1", 1.0}}};
    auto same = apply_readout(zero, ReadoutError{});
    EXPECT_EQ(same.probs, zero.probs);
    auto a = apply_readout(zero, ReadoutError{0.1, 0.0});
    EXPECT_NEAR(a.at("0"), 0.9, 1e-15);
    EXPECT_NEAR(a.at("1"), 0.1, 1e-15);
    auto b = apply_readout(one, ReadoutError{0.0, 0.3});
    EXPECT_NEAR(b.at("1"), 0.7, 1e-15);
    EXPECT_NEAR(b.at("0"), 0.3, 1e-15);
    Distribution bell{{{"00", 0.5}, {"11", 0.5}}};
    std::vector<ReadoutError> errs{{0.02, 0.05}, {0.03, 0.01}};
    auto r = apply_readout(bell, errs);
    EXPECT_NEAR(r.total(), 1.0, 1e-12);
    EXPECT_NEAR(r.at("10"), 0.5 * 0.02 * 0.97 + 0.5 * 0.95 * 0.01, 1e-15);
}

TEST(RunShots, DeterministicPerSeed) {
    auto m = mixed_model();
    Circuit c = build_ghz(3, toronto_ghz_mapping());
    auto a = run_shots(c, m, 5000, 42);
    auto b = run_shots(c, m, 5000, 42);
    EXPECT_EQ(a.counts, b.counts);
    auto other = run_shots(c, m, 5000, 43);
    EXPECT_NE(a.counts, other.counts);
    EXPECT_THROW(run_shots(c, m, 0, 1), ValidationError);
}

TEST(RunShots, NoiselessBvIsDeterministic) {
    auto counts = run_shots(build_bv("101", {22, 24, 26}, 25), NoiseModel{}, 8192, 3);
    EXPECT_EQ(counts.counts.size(), 1u);
    EXPECT_EQ(counts.at("101"), 8192u);
}

TEST(RunShots, ConvergesToDensityMatrix) {
    auto m = mixed_model();
    m.set_overrotation({GateKind::CNOT, {1, 2}}, 0.08);
    for (const Circuit &c : {build_bell(0, 1), build_ghz(3, toronto_ghz_mapping())}) {
        auto counts = run_shots(c, m, 1000000, 17);
        EXPECT_LT(tvd_of(counts.normalized(), run_exact(c, &m)), 0.005);
    }
}

TEST(RunShots, PtmNoiseSamplesExactDistribution) {
    NoiseModel m;
    m.set_channel({GateKind::CNOT, {0, 1}}, ptm_of_pauli_channel(depolarizing_to_pauli({0.1, {0, 1}})));
    Circuit bell = build_bell(0, 1);
    auto counts = run_shots(bell, m, 200000, 8);
    EXPECT_LT(tvd_of(counts.normalized(), run_exact(bell, &m)), 0.01);
}

TEST(Counts, JsonRoundTrip) {
    Counts c{{{"01", 3}, {"10", 5}}, 8, 99};
    auto back = counts_from_json(counts_to_json(c));
    EXPECT_EQ(back.counts, c.counts);
    EXPECT_EQ(back.shots, 8u);
    EXPECT_EQ(back.seed, 99u);
    auto bad = counts_to_json(c);
    bad["shots"] = 9;
    EXPECT_THROW(counts_from_json(bad), ValidationError);
}

TEST(SampleCounts, SumsToShots) {
    Distribution d{{{"00", 0.25}, {"01", 0.25}, {"11", 0.5}}};
    auto c = sample_counts(d, 100000, 1);
    std::uint64_t total = 0;
    for (const auto &[k, n] : c.counts) {
        total += n;
    }
    EXPECT_EQ(total, 100000u);
    EXPECT_LT(tvd_of(c.normalized(), d), 0.01);
}

TEST(NoiseModel, JsonRoundTripAndArity) {
    auto m = mixed_model();
    m.set_overrotation({GateKind::CNOT, {0, 1}}, 0.15);
    m.set_channel({GateKind::X, {2}}, ptm_of_pauli_channel(depolarizing_to_pauli({0.01, {0}})));
    auto back = noise_model_from_json(noise_model_to_json(m));
    Circuit c = build_ghz(3, toronto_ghz_mapping());
    EXPECT_LT(tvd_of(run_exact(c, &m), run_exact(c, &back)), 1e-15);
    EXPECT_THROW(m.set_channel({GateKind::CNOT, {0, 1}}, DepolarizingParams{0.1, {0}}), ValidationError);
    EXPECT_THROW(m.set_channel({GateKind::H, {0}}, depolarizing_to_pauli({0.1, {0, 1}})), ValidationError);
}

}  // namespace
}  // namespace noisebench
