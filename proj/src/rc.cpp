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
#include <optional>

#include "noisebench/error.hpp"
#include "noisebench/parallel.hpp"
#include "noisebench/rng.hpp"

namespace noisebench {

using json = nlohmann::json;

namespace {

bool is_pauli_like(const Gate &g) {
    return g.kind == GateKind::PAULI || g.kind == GateKind::X;
}

char pauli_letter(const Gate &g) {
    return g.kind == GateKind::X ? 'X' : g.pauli;
}

char multiply_letters(char a, char b) {
    PauliString pa(1), pb(1);
    pa.set(0, a);
    pb.set(0, b);
    return pauli_mul(pa, pb).pauli.letter(0);
}

// Folds runs of Pauli gates into one and drops identity Paulis.
std::vector<Gate> fold_paulis(const std::vector<Gate> &gates, int qubit) {
    std::vector<Gate> out;
    std::size_t i = 0;
    while (i < gates.size()) {
        if (!is_pauli_like(gates[i])) {
            out.push_back(gates[i]);
            ++i;
            continue;
        }
        std::size_t j = i;
        char acc = 'I';
        while (j < gates.size() && is_pauli_like(gates[j])) {
            acc = multiply_letters(acc, pauli_letter(gates[j]));
            ++j;
        }
        if (j - i == 1) {
            if (!(gates[i].kind == GateKind::PAULI && gates[i].pauli == 'I')) {
                out.push_back(gates[i]);
            }
        } else if (acc != 'I') {
            out.push_back(Gate::pauli_gate(qubit, acc));
        }
        i = j;
    }
    return out;
}

using QubitLists = std::map<int, std::vector<Gate>>;

std::vector<Cycle> layout(const QubitLists &lists) {
    std::size_t depth = 0;
    for (const auto &[q, gates] : lists) {
        depth = std::max(depth, gates.size());
    }
    std::vector<Cycle> cycles(depth);
    for (const auto &[q, gates] : lists) {
        for (std::size_t k = 0; k < gates.size(); ++k) {
            cycles[k].gates.push_back(gates[k]);
        }
    }
    return cycles;
}

}  // namespace

Circuit twirl_once(const Circuit &c, std::uint64_t seed) {
    auto body = c.body();
    bool any_hard = false;
    for (const auto &cycle : body) {
        for (const auto &g : cycle.gates) {
            if (g.is_hard()) {
                if (g.kind != GateKind::CNOT) {
                    throw ValidationError("twirl: only CNOT is supported as a hard gate, got " +
                                          std::string(kind_name(g.kind)));
                }
                any_hard = true;
            }
        }
    }
    if (!any_hard) {
        return c;
    }
    Rng rng(seed);
    std::vector<Cycle> out;
    QubitLists gap;
    for (const auto &cycle : body) {
        if (!cycle.has_hard_gate()) {
            for (const auto &g : cycle.gates) {
                gap[g.qubits[0]].push_back(g);
            }
            continue;
        }
        // Pre-twirl Paulis close the current gap; corrections open the next one.
        QubitLists next_gap;
        for (const auto &g : cycle.gates) {
            if (!g.is_hard()) {
                continue;
            }
            PauliString p = PauliString::from_index(2, rng.below(16));
            Gate local = Gate::make(GateKind::CNOT, {0, 1});
            PauliString corr = conjugate(p, local).pauli;
            for (int k = 0; k < 2; ++k) {
                gap[g.qubits[k]].push_back(Gate::pauli_gate(g.qubits[k], p.letter(k)));
                next_gap[g.qubits[k]].push_back(Gate::pauli_gate(g.qubits[k], corr.letter(k)));
            }
        }
        for (auto &[q, gates] : gap) {
            gates = fold_paulis(gates, q);
        }
        for (auto &cyc : layout(gap)) {
            out.push_back(std::move(cyc));
        }
        out.push_back(cycle);
        gap = std::move(next_gap);
    }
    for (auto &[q, gates] : gap) {
        gates = fold_paulis(gates, q);
    }
    for (auto &cyc : layout(gap)) {
        out.push_back(std::move(cyc));
    }
    return Circuit::make(c.num_qubits, std::move(out), c.measured);
}

RCSet rc_set(const Circuit &c, std::size_t n, std::uint64_t seed) {
    if (n == 0) {
        throw ValidationError("rc_set: need at least one randomization");
    }
    RCSet set{c, seed, std::vector<Circuit>(n)};
    parallel_for(n, [&](std::size_t i) { set.circuits[i] = twirl_once(c, derive_seed(seed, i)); });
    return set;
}

Counts aggregate(std::span<const Counts> results) {
    if (results.empty()) {
        throw ValidationError("aggregate: no results");
    }
    Counts out;
    std::optional<std::size_t> width;
    for (const auto &r : results) {
        for (const auto &[k, n] : r.counts) {
            if (width && *width != k.size()) {
                throw ValidationError("aggregate: results measure different registers");
            }
            width = k.size();
            out.counts[k] += n;
        }
        out.shots += r.shots;
    }
    return out;
}

PauliChannel twirl_average_channel(std::span<const Eigen::MatrixXcd> kraus) {
    if (kraus.empty()) {
        throw ValidationError("twirl: no Kraus operators");
    }
    const auto dim = kraus[0].rows();
    std::size_t n = 0;
    while ((Eigen::Index{1} << n) < dim) {
        ++n;
    }
    std::map<PauliString, double> rates;
    double total = 0;
    for (const auto &p : all_paulis(n)) {
        Eigen::MatrixXcd pm = pauli_matrix(p);
        double r = 0;
        for (const auto &k : kraus) {
            r += std::norm((pm * k).trace() / static_cast<double>(dim));
        }
        if (r > 1e-300) {
            rates[p] = r;
            total += r;
        }
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ValidationError("twirl: Kraus operators are not trace preserving");
    }
    for (auto &[p, r] : rates) {
        r /= total;
    }
    return PauliChannel(n, std::move(rates));
}

PauliChannel twirl_average_channel(const PauliChannel &c) {
    return c;
}

PauliChannel twirl_average_overrotation(double theta, std::size_t num_qubits) {
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(1, 1);
    Eigen::MatrixXcd rx = rx_matrix(theta);
    for (std::size_t i = 0; i < num_qubits; ++i) {
        Eigen::MatrixXcd next(u.rows() * 2, u.cols() * 2);
        for (Eigen::Index r = 0; r < u.rows(); ++r) {
            for (Eigen::Index k = 0; k < u.cols(); ++k) {
                next.block(r * 2, k * 2, 2, 2) = u(r, k) * rx;
            }
        }
        u = next;
    }
    std::vector<Eigen::MatrixXcd> kraus{u};
    return twirl_average_channel(kraus);
}

json rc_manifest(const RCSet &set, std::span<const std::string> member_files, const std::string &base_file) {
    return {{"base", base_file},
            {"n", set.circuits.size()},
            {"seed", set.seed},
            {"members", std::vector<std::string>(member_files.begin(), member_files.end())}};
}

}  // namespace noisebench
