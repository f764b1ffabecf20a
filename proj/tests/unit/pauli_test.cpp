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

#include "noisebench/pauli.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "noisebench/error.hpp"

namespace noisebench {
namespace {

using C = std::complex<double>;

// Dense oracle for a Pauli channel acting on rho.
Eigen::MatrixXcd apply_channel(const PauliChannel &c, const Eigen::MatrixXcd &rho) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    for (const auto &[p, r] : c.rates()) {
        Eigen::MatrixXcd m = pauli_matrix(p);
        out += r * m * rho * m.adjoint();
    }
    return out;
}

PauliChannel random_channel(std::size_t n, std::mt19937_64 &rng) {
    std::exponential_distribution<double> e(1.0);
    std::map<PauliString, double> rates;
    double total = 0;
    for (const auto &p : all_paulis(n)) {
        double v = e(rng);
        rates[p] = v;
        total += v;
    }
    for (auto &[p, v] : rates) {
        v /= total;
    }
    return PauliChannel(n, rates);
}

TEST(PauliString, ParsesAndPrints) {
    auto p = PauliString::from_str("IXYZ");
    EXPECT_EQ(p.num_qubits(), 4u);
    EXPECT_EQ(p.str(), "IXYZ");
    EXPECT_EQ(p.letter(2), 'Y');
    EXPECT_EQ(p.weight(), 3u);
    EXPECT_THROW(PauliString::from_str("XQ"), ValidationError);
}

TEST(PauliString, LexicographicIndexRoundTrips) {
    auto all = all_paulis(2);
    ASSERT_EQ(all.size(), 16u);
    EXPECT_EQ(all[0].str(), "II");
    EXPECT_EQ(all[1].str(), "IX");
    EXPECT_EQ(all[4].str(), "XI");
    EXPECT_EQ(all[15].str(), "ZZ");
    for (std::size_t i = 0; i < all.size(); ++i) {
        EXPECT_EQ(all[i].index(), i);
        EXPECT_EQ(PauliString::from_index(2, i), all[i]);
        if (i) {
            EXPECT_LT(all[i - 1], all[i]);
        }
    }
}

TEST(PauliString, RestrictAndEmbed) {
    auto p = PauliString::from_str("XIZY");
    std::vector<int> qs{3, 0};
    EXPECT_EQ(p.restrict_to(qs).str(), "YX");
    EXPECT_EQ(PauliString::from_str("YX").embed(4, qs).str(), "XIIY");
    EXPECT_EQ(PauliString::from_str("XY").tensor(PauliString::from_str("Z")).str(), "XYZ");
}

TEST(PauliMul, Examples) {
    auto xx = pauli_mul(PauliString::from_str("X"), PauliString::from_str("X"));
    EXPECT_EQ(xx.pauli.str(), "I");
    EXPECT_EQ(xx.phase, 0);
    auto xy = pauli_mul(PauliString::from_str("X"), PauliString::from_str("Y"));
    EXPECT_EQ(xy.pauli.str(), "Z");
    EXPECT_EQ(xy.phase, 1);
    auto xxzz = pauli_mul(PauliString::from_str("XX"), PauliString::from_str("ZZ"));
    EXPECT_EQ(xxzz.pauli.str(), "YY");
    EXPECT_EQ(xxzz.phase, 2);
    EXPECT_THROW(pauli_mul(PauliString::from_str("X"), PauliString::from_str("XX")), ValidationError);
}

TEST(PauliMul, MatchesDenseProductForAllTwoQubitPairs) {
    const C phases[4] = {C(1, 0), C(0, 1), C(-1, 0), C(0, -1)};
    for (const auto &p : all_paulis(2)) {
        for (const auto &q : all_paulis(2)) {
            auto prod = pauli_mul(p, q);
            Eigen::MatrixXcd dense = pauli_matrix(p) * pauli_matrix(q);
            Eigen::MatrixXcd ours = phases[prod.phase] * pauli_matrix(prod.pauli);
            EXPECT_LT((dense - ours).norm(), 1e-12) << p.str() << "*" << q.str();
        }
    }
}

TEST(Commutes, Examples) {
    EXPECT_FALSE(commutes(PauliString::from_str("X"), PauliString::from_str("Z")));
    EXPECT_TRUE(commutes(PauliString::from_str("XX"), PauliString::from_str("ZZ")));
    for (const auto &p : all_paulis(2)) {
        EXPECT_TRUE(commutes(p, PauliString(2)));
    }
}

TEST(Commutes, AgreesWithDenseCommutator) {
    for (std::size_t n : {1u, 2u}) {
        for (const auto &p : all_paulis(n)) {
            for (const auto &q : all_paulis(n)) {
                Eigen::MatrixXcd a = pauli_matrix(p), b = pauli_matrix(q);
                bool dense = (a * b - b * a).norm() < 1e-12;
                EXPECT_EQ(commutes(p, q), dense);
            }
        }
    }
}

TEST(Depolarizing, SingleAndTwoQubit) {
    auto one = depolarizing_to_pauli({0.03, {0}});
    EXPECT_NEAR(one.rate(PauliString::from_str("I")), 0.97, 1e-15);
    for (const char *l : {"X", "Y", "Z"}) {
        EXPECT_NEAR(one.rate(PauliString::from_str(l)), 0.01, 1e-15);
    }
    auto none = depolarizing_to_pauli({0.0, {0}});
    EXPECT_EQ(none.rate(PauliString::from_str("I")), 1.0);
    auto two = depolarizing_to_pauli({0.03, {0, 1}});
    EXPECT_NEAR(two.rate(PauliString::from_str("II")), 0.9409, 1e-12);
    EXPECT_NEAR(two.rate(PauliString::from_str("IX")), 0.0097, 1e-12);
    EXPECT_THROW(depolarizing_to_pauli({1.5, {0}}), ValidationError);
}

TEST(PauliChannel, ValidatesRates) {
    EXPECT_THROW(PauliChannel(1, {{PauliString::from_str("I"), 0.5}}), ValidationError);
    EXPECT_THROW(PauliChannel(1, {{PauliString::from_str("I"), 1.1}, {PauliString::from_str("X"), -0.1}}),
                 ValidationError);
}

TEST(Fidelities, Examples) {
    auto id = channel_to_fidelities(PauliChannel(1));
    for (const auto &[p, f] : id.values()) {
        EXPECT_EQ(f, 1.0);
    }
    double p = 0.03;
    auto dep = channel_to_fidelities(depolarizing_to_pauli({p, {0}}));
    for (const char *l : {"X", "Y", "Z"}) {
        EXPECT_NEAR(dep.at(PauliString::from_str(l)), 1 - 4 * p / 3, 1e-15);
    }
    double q = 0.1;
    auto flip = channel_to_fidelities(
        PauliChannel(1, {{PauliString::from_str("I"), 1 - q}, {PauliString::from_str("X"), q}}));
    EXPECT_NEAR(flip.at(PauliString::from_str("X")), 1.0, 1e-15);
    EXPECT_NEAR(flip.at(PauliString::from_str("Y")), 1 - 2 * q, 1e-15);
    EXPECT_NEAR(flip.at(PauliString::from_str("Z")), 1 - 2 * q, 1e-15);
}

TEST(Fidelities, MatchDenseTraceOracle) {
    std::mt19937_64 rng(11);
    for (std::size_t n : {1u, 2u}) {
        for (int trial = 0; trial < 20; ++trial) {
            auto c = random_channel(n, rng);
            auto f = channel_to_fidelities(c);
            double d = std::pow(2.0, n);
            for (const auto &p : all_paulis(n)) {
                Eigen::MatrixXcd m = pauli_matrix(p);
                double dense = (m * apply_channel(c, m)).trace().real() / d;
                EXPECT_NEAR(f.at(p), dense, 1e-9);
            }
        }
    }
}

TEST(Fidelities, RoundTripFullSupport) {
    std::mt19937_64 rng(5);
    for (std::size_t n : {1u, 2u}) {
        auto support = all_paulis(n);
        for (int trial = 0; trial < 50; ++trial) {
            auto c = random_channel(n, rng);
            auto back = fidelities_to_channel(channel_to_fidelities(c), support);
            for (const auto &p : support) {
                EXPECT_NEAR(back.rate(p), c.rate(p), 1e-9);
            }
        }
    }
    auto dep = depolarizing_to_pauli({0.03, {0}});
    auto back = fidelities_to_channel(channel_to_fidelities(dep), all_paulis(1));
    EXPECT_NEAR(back.rate(PauliString::from_str("I")), 0.97, 1e-12);
    EXPECT_NEAR(back.rate(PauliString::from_str("Y")), 0.01, 1e-12);
}

TEST(Fidelities, NegativeRateIsClippedAndRenormalized) {
    // Rates (0.97, 0.01, 0.01, 0.01) with f(X) raised so the X rate becomes -0.002.
    auto f = channel_to_fidelities(depolarizing_to_pauli({0.03, {0}}));
    std::map<PauliString, double> values = f.values();
    // Raw inverse: p_X = (f_I + f_X - f_Y - f_Z) / 4; lowering f_X by 0.048 gives -0.002.
    values[PauliString::from_str("X")] -= 0.048;
    auto support = all_paulis(1);
    auto c = fidelities_to_channel(FidelityVector(1, values), support);
    // Oracle: raw rates from the explicit inverse, clip, renormalize.
    Eigen::MatrixXd w = walsh_hadamard_matrix(1);
    Eigen::Vector4d fv;
    for (int i = 0; i < 4; ++i) {
        fv[i] = values.at(support[i]);
    }
    Eigen::Vector4d raw = w.transpose() * fv / 4.0;
    EXPECT_NEAR(raw[1], -0.002, 1e-12);
    Eigen::Vector4d clipped = raw.cwiseMax(0.0);
    clipped /= clipped.sum();
    EXPECT_EQ(c.rate(support[1]), 0.0);
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(c.rate(support[i]), clipped[i], 1e-12);
    }
}

TEST(Fidelities, RestrictedSupport) {
    // Bit-flip channel recovered from {I, Z} fidelities on support {I, X}.
    double q = 0.04;
    PauliChannel c(1, {{PauliString::from_str("I"), 1 - q}, {PauliString::from_str("X"), q}});
    std::vector<PauliString> measured{PauliString::from_str("I"), PauliString::from_str("Z")};
    auto f = channel_to_fidelities(c, measured);
    std::vector<PauliString> support{PauliString::from_str("I"), PauliString::from_str("X")};
    auto back = fidelities_to_channel(f, support);
    EXPECT_NEAR(back.rate(support[1]), q, 1e-12);
    // Three unknown rates from two fidelities cannot be determined.
    std::vector<PauliString> big{PauliString::from_str("I"), PauliString::from_str("X"), PauliString::from_str("Y")};
    EXPECT_THROW(fidelities_to_channel(f, big), ValidationError);
}

TEST(WalshHadamard, SquaresToScaledIdentity) {
    for (std::size_t n : {1u, 2u}) {
        Eigen::MatrixXd w = walsh_hadamard_matrix(n);
        double d = std::pow(4.0, n);
        EXPECT_LT((w * w - d * Eigen::MatrixXd::Identity(w.rows(), w.cols())).norm(), 1e-12);
    }
}

TEST(PTM, PauliChannelExamples) {
    EXPECT_LT((ptm_of_pauli_channel(PauliChannel(1)).matrix - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-15);
    double p = 0.06;
    auto dep = ptm_of_pauli_channel(depolarizing_to_pauli({p, {0}}));
    Eigen::Vector4d expect(1, 1 - 4 * p / 3, 1 - 4 * p / 3, 1 - 4 * p / 3);
    EXPECT_LT((dep.matrix - Eigen::MatrixXd(expect.asDiagonal())).norm(), 1e-12);
    double q = 0.1;
    auto flip = ptm_of_pauli_channel(
        PauliChannel(1, {{PauliString::from_str("I"), 1 - q}, {PauliString::from_str("X"), q}}));
    Eigen::Vector4d fexpect(1, 1, 1 - 2 * q, 1 - 2 * q);
    EXPECT_LT((flip.matrix - Eigen::MatrixXd(fexpect.asDiagonal())).norm(), 1e-12);
}

TEST(PTM, KrausOfPauliChannelMatchesDiagonal) {
    std::mt19937_64 rng(3);
    auto c = random_channel(2, rng);
    std::vector<Eigen::MatrixXcd> kraus;
    for (const auto &[p, r] : c.rates()) {
        kraus.push_back(std::sqrt(r) * pauli_matrix(p));
    }
    EXPECT_LT((ptm_of_kraus(kraus).matrix - ptm_of_pauli_channel(c).matrix).norm(), 1e-12);
}

TEST(PTM, UnitaryIsOrthogonalWithUnitFirstRow) {
    Eigen::MatrixXcd h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    auto ptm = ptm_of_unitary(h);
    EXPECT_LT((ptm.matrix * ptm.matrix.transpose() - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-12);
    EXPECT_NEAR(ptm.matrix(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(ptm.matrix(3, 1), 1.0, 1e-12);  // X -> Z
}

TEST(PauliChannel, ComposeMatchesDense) {
    std::mt19937_64 rng(9);
    auto a = random_channel(1, rng);
    auto b = random_channel(1, rng);
    Eigen::MatrixXcd rho(2, 2);
    rho << 0.7, C(0.1, 0.2), C(0.1, -0.2), 0.3;
    EXPECT_LT((apply_channel(a.then(b), rho) - apply_channel(b, apply_channel(a, rho))).norm(), 1e-12);
    auto t = a.tensor(b);
    EXPECT_NEAR(t.rate(PauliString::from_str("XZ")),
                a.rate(PauliString::from_str("X")) * b.rate(PauliString::from_str("Z")), 1e-15);
}

}  // namespace
}  // namespace noisebench
