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

#include "noisebench/circuit.hpp"

#include <gtest/gtest.h>

#include "noisebench/error.hpp"

namespace noisebench {
namespace {

// Dense matrix of a gate embedded on an n-qubit register (qubit 0 most significant).
Eigen::MatrixXcd embed_gate(const Gate &g, std::size_t n) {
    std::size_t dim = std::size_t{1} << n;
    Eigen::MatrixXcd u = gate_unitary(g);
    std::size_t k = g.qubits.size();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    auto bit = [n](std::size_t idx, int q) { return (idx >> (n - 1 - q)) & 1u; };
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            bool rest_equal = true;
            for (std::size_t q = 0; q < n; ++q) {
                if (std::find(g.qubits.begin(), g.qubits.end(), static_cast<int>(q)) == g.qubits.end() &&
                    bit(r, q) != bit(c, q)) {
                    rest_equal = false;
                }
            }
            if (!rest_equal) {
                continue;
            }
            std::size_t lr = 0, lc = 0;
            for (std::size_t j = 0; j < k; ++j) {
                lr = (lr << 1) | bit(r, g.qubits[j]);
                lc = (lc << 1) | bit(c, g.qubits[j]);
            }
            out(r, c) = u(lr, lc);
        }
    }
    return out;
}

TEST(Builders, Bell) {
    Circuit c = build_bell(0, 1);
    ASSERT_EQ(c.body().size(), 2u);
    EXPECT_EQ(c.cycles[0].gates[0].kind, GateKind::H);
    EXPECT_EQ(c.cycles[0].gates[0].qubits, std::vector<int>{0});
    EXPECT_EQ(c.cycles[1].gates[0].kind, GateKind::CNOT);
    EXPECT_EQ(c.cycles[1].gates[0].qubits, (std::vector<int>{0, 1}));
    EXPECT_TRUE(c.cycles[1].gates[0].is_hard());
    EXPECT_EQ(c.measured, (std::vector<int>{0, 1}));
    EXPECT_TRUE(c.cycles.back().is_measurement());
    Circuit r = build_bell(1, 0);
    EXPECT_EQ(r.cycles[0].gates[0].qubits, std::vector<int>{1});
    EXPECT_EQ(r.cycles[1].gates[0].qubits, (std::vector<int>{1, 0}));
    EXPECT_THROW(build_bell(2, 2), ValidationError);
}

TEST(Builders, GhzFollowsMapping) {
    auto mapping = toronto_ghz_mapping();
    auto topo = toronto_topology();
    Circuit g3 = build_ghz(3, mapping, &topo);
    ASSERT_EQ(g3.body().size(), 3u);
    EXPECT_EQ(g3.cycles[1].gates[0].qubits, (std::vector<int>{0, 1}));
    EXPECT_EQ(g3.cycles[2].gates[0].qubits, (std::vector<int>{1, 2}));
    Circuit g2 = build_ghz(2, mapping, &topo);
    EXPECT_EQ(g2, build_bell(0, 1, g2.num_qubits));
    Circuit g5 = build_ghz(5, mapping, &topo);
    EXPECT_EQ(g5.cycles[4].gates[0].qubits, (std::vector<int>{3, 5}));
    EXPECT_EQ(g5.measured, (std::vector<int>{0, 1, 2, 3, 5}));
    EXPECT_THROW(build_ghz(1, mapping), ValidationError);
    EXPECT_THROW(build_ghz(28, mapping), ValidationError);
    Topology tiny = line_topology(2);
    EXPECT_THROW(build_ghz(3, mapping, &tiny), ValidationError);
}

TEST(Builders, GhzStructure) {
    auto mapping = toronto_ghz_mapping();
    for (int n = 2; n <= 27; ++n) {
        Circuit c = build_ghz(n, mapping);
        EXPECT_EQ(c.gate_count(GateKind::CNOT), static_cast<std::size_t>(n - 1));
        EXPECT_EQ(c.gate_count(GateKind::H), 1u);
        std::map<int, int> target_count;
        for (const auto &cycle : c.body()) {
            for (const auto &g : cycle.gates) {
                if (g.kind == GateKind::CNOT) {
                    ++target_count[g.qubits[1]];
                }
            }
        }
        for (const auto &[q, k] : target_count) {
            EXPECT_LE(k, 1);
        }
        EXPECT_EQ(c.measured.size(), static_cast<std::size_t>(n));
    }
}

TEST(Builders, BernsteinVazirani) {
    std::vector<int> data{22, 24, 26};
    Circuit c = build_bv("101", data, 25);
    EXPECT_EQ(c.gate_count(GateKind::CNOT), 2u);
    EXPECT_EQ(c.body().size(), 5u);
    EXPECT_EQ(c.cycles[2].gates[0].qubits, (std::vector<int>{22, 25}));
    EXPECT_EQ(c.cycles[3].gates[0].qubits, (std::vector<int>{26, 25}));
    EXPECT_EQ(c.measured, data);
    EXPECT_EQ(build_bv("000", data, 25).gate_count(GateKind::CNOT), 0u);
    EXPECT_EQ(build_bv("111", data, 25).gate_count(GateKind::CNOT), 3u);
    EXPECT_THROW(build_bv("10", data, 25), ValidationError);
    EXPECT_THROW(build_bv("101", data, 24), ValidationError);
}

TEST(Circuit, RejectsReusedQubitInCycle) {
    EXPECT_THROW(Circuit::make(2, {Cycle{{Gate::make(GateKind::H, {0}), Gate::make(GateKind::X, {0})}}}, {0}),
                 ValidationError);
    EXPECT_THROW(Circuit::make(2, {Cycle{{Gate::make(GateKind::CNOT, {0, 0})}}}, {0}), ValidationError);
    EXPECT_THROW(Circuit::make(2, {Cycle{{Gate::make(GateKind::H, {2})}}}, {0}), ValidationError);
}

TEST(Serialization, RoundTrips) {
    Circuit bell = build_bell(0, 1);
    EXPECT_EQ(parse_circuit(serialize(bell)), bell);
    Circuit ghz = build_ghz(27, toronto_ghz_mapping());
    Circuit back = parse_circuit(serialize(ghz));
    EXPECT_EQ(back, ghz);
    EXPECT_EQ(back.body().size(), 27u);
    for (std::size_t i = 1; i < 27; ++i) {
        EXPECT_EQ(back.cycles[i].gates[0].qubits[1], ghz.cycles[i].gates[0].qubits[1]);
    }
    Circuit custom = Circuit::make(2, {Cycle{{Gate::pauli_gate(0, 'Y')}}}, {0, 1});
    custom.cycles[0].gates[0].hardness = Hardness::Hard;
    EXPECT_EQ(parse_circuit(serialize(custom)), custom);
}

TEST(Serialization, ErrorsNameCycleAndLine) {
    std::string text = serialize(build_ghz(3, toronto_ghz_mapping()));
    auto pos = text.find("[1,2]");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 5, "[1,9]");
    try {
        parse_circuit(text);
        FAIL() << "expected a parse error";
    } catch (const ParseError &e) {
        EXPECT_NE(e.reason().find("cycle 2"), std::string::npos) << e.what();
        EXPECT_EQ(e.line(), 5u) << e.what();
    }
    try {
        parse_circuit("{\n  \"n_qubits\": 2,\n  \"cycles\": [[{]\n}");
        FAIL() << "expected a parse error";
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 3u) << e.what();
    }
}

TEST(Topology, Toronto) {
    Topology t = toronto_topology();
    EXPECT_EQ(t.nodes.size(), 27u);
    EXPECT_TRUE(t.has_edge(0, 1));
    EXPECT_TRUE(t.has_edge(25, 22));
    EXPECT_EQ(t.couplings().size(), 28u);
    for (const auto &[a, b] : t.edges) {
        EXPECT_NE(a, b);
    }
    for (const auto &[c, tg] : toronto_ghz_mapping().cnots) {
        EXPECT_TRUE(t.has_edge(c, tg));
    }
    for (int q : {22, 24, 26}) {
        EXPECT_TRUE(t.has_edge(q, 25));
    }
    Topology bad{{0, 1}, {{0, 0}}};
    EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Clifford, ConjugationMatchesDenseOracle) {
    const std::size_t n = 3;
    std::vector<Gate> gates;
    for (GateKind k : {GateKind::H, GateKind::X, GateKind::I, GateKind::RX90, GateKind::RY90, GateKind::RZ90}) {
        gates.push_back(Gate::make(k, {1}));
    }
    for (char l : {'I', 'X', 'Y', 'Z'}) {
        gates.push_back(Gate::pauli_gate(2, l));
    }
    gates.push_back(Gate::make(GateKind::CNOT, {0, 2}));
    gates.push_back(Gate::make(GateKind::CNOT, {2, 1}));
    for (const auto &g : gates) {
        Eigen::MatrixXcd u = embed_gate(g, n);
        for (const auto &p : all_paulis(n)) {
            SignedPauli img = conjugate(p, g);
            Eigen::MatrixXcd expect = u * pauli_matrix(p) * u.adjoint();
            Eigen::MatrixXcd got = (img.negative ? -1.0 : 1.0) * pauli_matrix(img.pauli);
            EXPECT_LT((expect - got).norm(), 1e-12) << kind_name(g.kind) << " on " << p.str();
        }
    }
}

TEST(Clifford, CnotTwirlCorrection) {
    Gate cx = Gate::make(GateKind::CNOT, {0, 1});
    auto img = conjugate(PauliString::from_str("XI"), cx);
    EXPECT_EQ(img.pauli.str(), "XX");
    EXPECT_FALSE(img.negative);
    EXPECT_THROW(conjugate(PauliString::from_str("XI"), Gate::make(GateKind::MEASURE, {0})), ValidationError);
}

}  // namespace
}  // namespace noisebench
