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

#include "noisebench/rc.hpp"

#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "../common/dense_oracles.hpp"
#include "noisebench/error.hpp"
#include "noisebench/metrics.hpp"
#include "noisebench/rng.hpp"

namespace noisebench {
namespace {

using Mat = Eigen::MatrixXcd;
using testing::dense_twirl;
using testing::kron;
using testing::random_unitary;

std::vector<Circuit> equivalence_targets() {
    std::vector<Circuit> out{build_bell(0, 1)};
    GhzMapping line{0, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}}};
    for (int n = 3; n <= 6; ++n) {
        out.push_back(build_ghz(n, line));
    }
    for (int s = 0; s < 8; ++s) {
        std::string secret;
        for (int b = 2; b >= 0; --b) {
            secret += ((s >> b) & 1) ? '1' : '0';
        }
        out.push_back(build_bv(secret, {0, 1, 2}, 3));
    }
    return out;
}

int count_kind(const Circuit &c, GateKind k) {
    return static_cast<int>(c.gate_count(k));
}

TEST(Twirl, NoHardGatesUnchanged) {
    Circuit c = Circuit::make(2, {Cycle{{Gate::make(GateKind::H, {0}), Gate::make(GateKind::X, {1})}}}, {0, 1});
    EXPECT_EQ(twirl_once(c, 5), c);
}

TEST(Twirl, BellStaysBell) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Distribution d = run_exact(twirl_once(build_bell(0, 1), seed));
        EXPECT_NEAR(d.at("00"), 0.5, 1e-12);
        EXPECT_NEAR(d.at("11"), 0.5, 1e-12);
    }
}

TEST(Twirl, LogicalEquivalence200Seeds) {
    for (const auto &c : equivalence_targets()) {
        Distribution base = run_exact(c);
        RCSet set = rc_set(c, 200, 2024);
        for (const auto &t : set.circuits) {
            ASSERT_LE(tvd(run_exact(t), base), 1e-9) << serialize(t);
        }
    }
}

TEST(Twirl, CorrectionForXI) {
    SignedPauli s = conjugate(PauliString::from_str("XI"), Gate::make(GateKind::CNOT, {0, 1}));
    EXPECT_EQ(s.pauli.str(), "XX");
}

TEST(Twirl, CorrectionsUndoPreTwirl) {
    // Each CNOT is surrounded by Paulis P before and C after with C * CNOT * P = CNOT up to phase.
    Circuit bell = build_bell(0, 1);
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        Circuit t = twirl_once(bell, seed);
        Mat u = Mat::Identity(4, 4);
        for (const auto &cycle : t.body()) {
            Mat full = Mat::Identity(4, 4);
            for (const auto &g : cycle.gates) {
                Mat gu = gate_unitary(g);
                if (g.qubits.size() == 2) {
                    full = gu * full;
                } else {
                    Mat e = g.qubits[0] == 0 ? kron(gu, Mat::Identity(2, 2)) : kron(Mat::Identity(2, 2), gu);
                    full = e * full;
                }
            }
            u = full * u;
        }
        Mat expect = gate_unitary(Gate::make(GateKind::CNOT, {0, 1})) *
                     kron(gate_unitary(Gate::make(GateKind::H, {0})), Mat::Identity(2, 2));
        std::complex<double> phase = (expect.adjoint() * u).trace() / 4.0;
        EXPECT_NEAR(std::abs(phase), 1.0, 1e-12) << serialize(t);
    }
}

TEST(Twirl, GapsHoldFoldedPaulis) {
    GhzMapping line{0, {{0, 1}, {1, 2}, {2, 3}}};
    Circuit ghz = build_ghz(4, line);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Circuit t = twirl_once(ghz, seed);
        auto body = t.body();
        // Between consecutive hard cycles every qubit carries at most one gate.
        std::size_t last_hard = body.size();
        for (std::size_t i = 0; i < body.size(); ++i) {
            if (body[i].has_hard_gate()) {
                if (last_hard < body.size()) {
                    EXPECT_LE(i - last_hard, 2u) << serialize(t);
                }
                last_hard = i;
            }
        }
        EXPECT_EQ(count_kind(t, GateKind::CNOT), 3);
        EXPECT_EQ(count_kind(t, GateKind::H), 1);
    }
}

TEST(Twirl, IdentityDrawGivesBase) {
    Circuit bell = build_bell(0, 1);
    int found = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Circuit t = twirl_once(bell, seed);
        if (count_kind(t, GateKind::PAULI) == 0) {
            EXPECT_EQ(t, bell);
            ++found;
        }
    }
    EXPECT_GT(found, 0);
}

TEST(Twirl, Ghz20GateOverhead) {
    Circuit ghz = build_ghz(20, toronto_ghz_mapping());
    Circuit t = twirl_once(ghz, 11);
    std::size_t added = t.gate_count() - ghz.gate_count();
    EXPECT_GT(added, 19u);
    EXPECT_LE(added, 4u * 19u);
}

TEST(RcSet, DeterministicAndSized) {
    Circuit ghz = build_ghz(4, GhzMapping{0, {{0, 1}, {1, 2}, {2, 3}}});
    RCSet a = rc_set(ghz, 32, 7), b = rc_set(ghz, 32, 7);
    ASSERT_EQ(a.circuits.size(), 32u);
    EXPECT_EQ(a.circuits, b.circuits);
    EXPECT_EQ(a.circuits[3], twirl_once(ghz, derive_seed(7, 3)));
    EXPECT_THROW(rc_set(ghz, 0, 7), ValidationError);
}

TEST(Aggregate, SumsCounts) {
    Counts a{{{"00", 60}, {"11", 68}}, 128, 0};
    std::vector<Counts> two{a, a};
    Counts s = aggregate(two);
    EXPECT_EQ(s.at("00"), 120u);
    EXPECT_EQ(s.shots, 256u);
    std::vector<Counts> many(32, a);
    EXPECT_EQ(aggregate(many).shots, 4096u);
    Counts b{{{"01", 10}}, 10, 0};
    std::vector<Counts> ab{a, b}, ba{b, a};
    EXPECT_EQ(aggregate(ab).counts, aggregate(ba).counts);
    std::vector<Counts> bad{a, Counts{{{"1", 1}}, 1, 0}};
    EXPECT_THROW(aggregate(bad), ValidationError);
}

TEST(TwirlAverage, MatchesDenseOracle) {
    std::mt19937_64 gen(31);
    for (std::size_t n : {1u, 2u}) {
        const Eigen::Index d = Eigen::Index{1} << n;
        for (int trial = 0; trial < 5; ++trial) {
            // Random channel: K_k = sqrt(w_k) U_k.
            std::vector<Mat> kraus;
            double w[3] = {0.7, 0.2, 0.1};
            for (double wk : w) {
                kraus.push_back(std::sqrt(wk) * random_unitary(d, gen));
            }
            PauliChannel c = twirl_average_channel(std::span<const Mat>(kraus));
            for (const auto &[p, r] : dense_twirl(kraus, n)) {
                EXPECT_NEAR(c.rate(PauliString::from_str(p)), r, 1e-10) << p;
            }
        }
    }
}

TEST(TwirlAverage, AmplitudeDamping) {
    double g = 0.1;
    Mat k0(2, 2), k1(2, 2);
    k0 << 1, 0, 0, std::sqrt(1 - g);
    k1 << 0, std::sqrt(g), 0, 0;
    std::vector<Mat> kraus{k0, k1};
    PauliChannel c = twirl_average_channel(std::span<const Mat>(kraus));
    double s = std::sqrt(1 - g);
    EXPECT_NEAR(c.rate(PauliString::from_str("I")), (1 + s) * (1 + s) / 4, 1e-12);
    EXPECT_NEAR(c.rate(PauliString::from_str("X")), g / 4, 1e-12);
    EXPECT_NEAR(c.rate(PauliString::from_str("Y")), g / 4, 1e-12);
    EXPECT_NEAR(c.rate(PauliString::from_str("Z")), (1 - s) * (1 - s) / 4, 1e-12);
}

TEST(TwirlAverage, PauliChannelUnchanged) {
    PauliChannel c(2, {{PauliString::from_str("II"), 0.9}, {PauliString::from_str("XZ"), 0.1}});
    PauliChannel t = twirl_average_channel(c);
    EXPECT_EQ(t.rate(PauliString::from_str("XZ")), 0.1);
    std::vector<Mat> kraus{std::sqrt(0.9) * pauli_matrix(PauliString::from_str("II")),
                           std::sqrt(0.1) * pauli_matrix(PauliString::from_str("XZ"))};
    PauliChannel k = twirl_average_channel(std::span<const Mat>(kraus));
    EXPECT_NEAR(k.rate(PauliString::from_str("XZ")), 0.1, 1e-12);
    EXPECT_NEAR(k.rate(PauliString::from_str("II")), 0.9, 1e-12);
}

TEST(TwirlAverage, OverRotation) {
    PauliChannel zero = twirl_average_overrotation(0.0, 1);
    EXPECT_NEAR(zero.rate(PauliString::from_str("I")), 1.0, 1e-15);
    for (double theta : {0.15, 0.4, 1.3}) {
        PauliChannel c = twirl_average_overrotation(theta, 1);
        double cs = std::cos(theta / 2), sn = std::sin(theta / 2);
        EXPECT_NEAR(c.rate(PauliString::from_str("I")), cs * cs, 1e-14);
        EXPECT_NEAR(c.rate(PauliString::from_str("X")), sn * sn, 1e-14);
        PauliChannel two = twirl_average_overrotation(theta, 2);
        EXPECT_NEAR(two.rate(PauliString::from_str("XX")), std::pow(sn, 4), 1e-14);
        EXPECT_NEAR(two.rate(PauliString::from_str("IX")), cs * cs * sn * sn, 1e-14);
    }
}

TEST(RcManifest, ListsMembers) {
    RCSet set = rc_set(build_bell(0, 1), 2, 3);
    std::vector<std::string> files{"rc-000.json", "rc-001.json"};
    auto j = rc_manifest(set, files, "bell.json");
    EXPECT_EQ(j["n"], 2);
    EXPECT_EQ(j["members"][1], "rc-001.json");
    EXPECT_EQ(j["seed"], 3);
}

}  // namespace
}  // namespace noisebench
