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

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "embedded_data.hpp"
#include "noisebench/error.hpp"

namespace noisebench {

namespace {

using json = nlohmann::json;

constexpr std::array<std::pair<GateKind, std::string_view>, 9> kKindNames = {{
    {GateKind::H, "H"},
    {GateKind::X, "X"},
    {GateKind::I, "I"},
    {GateKind::RX90, "RX90"},
    {GateKind::RY90, "RY90"},
    {GateKind::RZ90, "RZ90"},
    {GateKind::CNOT, "CNOT"},
    {GateKind::MEASURE, "MEASURE"},
    {GateKind::PAULI, "PAULI"},
}};

std::string cycle_label(std::size_t c) {
    return "cycle " + std::to_string(c);
}

}  // namespace

std::string_view kind_name(GateKind kind) {
    for (const auto &[k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "?";
}

GateKind parse_kind(std::string_view name) {
    for (const auto &[k, n] : kKindNames) {
        if (n == name) {
            return k;
        }
    }
    throw ValidationError("unknown gate kind '" + std::string(name) + "'");
}

std::size_t kind_arity(GateKind kind) {
    return kind == GateKind::CNOT ? 2 : 1;
}

Gate Gate::make(GateKind kind, std::vector<int> qubits) {
    Gate g;
    g.kind = kind;
    g.qubits = std::move(qubits);
    g.hardness = kind == GateKind::CNOT ? Hardness::Hard : Hardness::Easy;
    return g;
}

Gate Gate::pauli_gate(int qubit, char letter) {
    Gate g = make(GateKind::PAULI, {qubit});
    g.pauli = letter;
    return g;
}

bool Cycle::is_measurement() const {
    return !gates.empty() &&
           std::all_of(gates.begin(), gates.end(), [](const Gate &g) { return g.kind == GateKind::MEASURE; });
}

bool Cycle::has_hard_gate() const {
    return std::any_of(gates.begin(), gates.end(), [](const Gate &g) { return g.is_hard(); });
}

std::vector<int> Cycle::qubits() const {
    std::vector<int> out;
    for (const auto &g : gates) {
        out.insert(out.end(), g.qubits.begin(), g.qubits.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

Circuit Circuit::make(int num_qubits, std::vector<Cycle> body, std::vector<int> measured) {
    Circuit c;
    c.num_qubits = num_qubits;
    c.cycles = std::move(body);
    c.measured = std::move(measured);
    if (!c.measured.empty()) {
        Cycle m;
        for (int q : c.measured) {
            m.gates.push_back(Gate::make(GateKind::MEASURE, {q}));
        }
        c.cycles.push_back(std::move(m));
    }
    c.validate();
    return c;
}

std::span<const Cycle> Circuit::body() const {
    std::size_t n = cycles.size();
    if (!measured.empty() && n > 0) {
        --n;
    }
    return {cycles.data(), n};
}

std::size_t Circuit::gate_count(std::optional<GateKind> kind) const {
    std::size_t count = 0;
    for (const auto &cycle : body()) {
        for (const auto &g : cycle.gates) {
            if (!kind || g.kind == *kind) {
                ++count;
            }
        }
    }
    return count;
}

std::vector<int> Circuit::active_qubits() const {
    std::set<int> qs;
    for (const auto &cycle : body()) {
        for (const auto &g : cycle.gates) {
            qs.insert(g.qubits.begin(), g.qubits.end());
        }
    }
    return {qs.begin(), qs.end()};
}

void Circuit::validate() const {
    if (num_qubits < 0) {
        throw ValidationError("negative qubit count");
    }
    for (std::size_t ci = 0; ci < cycles.size(); ++ci) {
        std::set<int> seen;
        const bool last = ci + 1 == cycles.size();
        for (const auto &g : cycles[ci].gates) {
            if (g.qubits.size() != kind_arity(g.kind)) {
                throw ValidationError(cycle_label(ci) + ": " + std::string(kind_name(g.kind)) + " expects " +
                                      std::to_string(kind_arity(g.kind)) + " qubit(s)");
            }
            for (int q : g.qubits) {
                if (q < 0 || q >= num_qubits) {
                    throw ValidationError(cycle_label(ci) + ": qubit index " + std::to_string(q) +
                                          " out of range for " + std::to_string(num_qubits) + " qubits");
                }
                if (!seen.insert(q).second) {
                    throw ValidationError(cycle_label(ci) + ": qubit " + std::to_string(q) + " used twice");
                }
            }
            if (g.kind == GateKind::MEASURE && !(last && !measured.empty())) {
                throw ValidationError(cycle_label(ci) + ": measurement outside the final cycle");
            }
            if (g.kind == GateKind::PAULI && std::string_view("IXYZ").find(g.pauli) == std::string_view::npos) {
                throw ValidationError(cycle_label(ci) + ": bad Pauli letter");
            }
        }
    }
    if (!measured.empty()) {
        if (cycles.empty() || !cycles.back().is_measurement()) {
            throw ValidationError("measured qubits given without a final measurement cycle");
        }
        std::vector<int> in_cycle;
        for (const auto &g : cycles.back().gates) {
            in_cycle.push_back(g.qubits[0]);
        }
        if (in_cycle != measured) {
            throw ValidationError(cycle_label(cycles.size() - 1) + ": measurement cycle disagrees with measured list");
        }
    }
}

bool Topology::has_node(int q) const {
    return std::find(nodes.begin(), nodes.end(), q) != nodes.end();
}

bool Topology::has_edge(int control, int target) const {
    return std::find(edges.begin(), edges.end(), std::pair{control, target}) != edges.end();
}

bool Topology::has_coupling(int a, int b) const {
    return has_edge(a, b) || has_edge(b, a);
}

std::vector<std::pair<int, int>> Topology::couplings() const {
    std::vector<std::pair<int, int>> out;
    std::set<std::pair<int, int>> seen;
    for (const auto &[a, b] : edges) {
        if (seen.insert({std::min(a, b), std::max(a, b)}).second) {
            out.emplace_back(a, b);
        }
    }
    return out;
}

void Topology::validate() const {
    std::set<int> ns(nodes.begin(), nodes.end());
    if (ns.size() != nodes.size()) {
        throw ValidationError("topology: duplicate node");
    }
    for (const auto &[a, b] : edges) {
        if (a == b) {
            throw ValidationError("topology: self-edge on " + std::to_string(a));
        }
        if (!ns.count(a) || !ns.count(b)) {
            throw ValidationError("topology: edge (" + std::to_string(a) + "," + std::to_string(b) +
                                  ") references a missing node");
        }
    }
}

Topology toronto_topology() {
    Topology t = topology_from_json(json::parse(data::kTorontoTopology));
    t.validate();
    return t;
}

GhzMapping toronto_ghz_mapping() {
    return ghz_mapping_from_json(json::parse(data::kTorontoGhzMapping));
}

Topology line_topology(int n) {
    Topology t;
    for (int q = 0; q < n; ++q) {
        t.nodes.push_back(q);
    }
    for (int q = 0; q + 1 < n; ++q) {
        t.edges.emplace_back(q, q + 1);
    }
    for (int q = 0; q + 1 < n; ++q) {
        t.edges.emplace_back(q + 1, q);
    }
    return t;
}

Circuit build_bell(int control, int target, int num_qubits) {
    if (control == target) {
        throw ValidationError("bell: control and target coincide");
    }
    int n = std::max(num_qubits, std::max(control, target) + 1);
    return Circuit::make(n,
                         {Cycle{{Gate::make(GateKind::H, {control})}},
                          Cycle{{Gate::make(GateKind::CNOT, {control, target})}}},
                         {control, target});
}

Circuit build_ghz(int n, const GhzMapping &mapping, const Topology *topology, int num_qubits) {
    if (n < 2 || n > static_cast<int>(mapping.cnots.size()) + 1) {
        throw ValidationError("ghz: size " + std::to_string(n) + " outside [2, " +
                              std::to_string(mapping.cnots.size() + 1) + "]");
    }
    std::vector<Cycle> body{Cycle{{Gate::make(GateKind::H, {mapping.root})}}};
    std::vector<int> measured{mapping.root};
    int max_q = mapping.root;
    for (int i = 0; i + 1 < n; ++i) {
        auto [c, t] = mapping.cnots[i];
        if (topology && !topology->has_edge(c, t)) {
            throw ValidationError("ghz: CNOT(" + std::to_string(c) + "," + std::to_string(t) +
                                  ") is not a topology edge");
        }
        body.push_back(Cycle{{Gate::make(GateKind::CNOT, {c, t})}});
        if (std::find(measured.begin(), measured.end(), t) == measured.end()) {
            measured.push_back(t);
        }
        max_q = std::max({max_q, c, t});
    }
    std::sort(measured.begin(), measured.end());
    return Circuit::make(std::max(num_qubits, max_q + 1), std::move(body), std::move(measured));
}

Circuit build_bv(std::string_view secret, const std::vector<int> &data_qubits, int oracle_qubit, int num_qubits) {
    if (secret.size() != data_qubits.size()) {
        throw ValidationError("bv: secret length differs from data qubit count");
    }
    if (std::find(data_qubits.begin(), data_qubits.end(), oracle_qubit) != data_qubits.end()) {
        throw ValidationError("bv: oracle qubit collides with a data qubit");
    }
    if (std::set<int>(data_qubits.begin(), data_qubits.end()).size() != data_qubits.size()) {
        throw ValidationError("bv: repeated data qubit");
    }
    int max_q = oracle_qubit;
    Cycle first, hadamards;
    for (int q : data_qubits) {
        first.gates.push_back(Gate::make(GateKind::H, {q}));
        hadamards.gates.push_back(Gate::make(GateKind::H, {q}));
        max_q = std::max(max_q, q);
    }
    first.gates.push_back(Gate::make(GateKind::X, {oracle_qubit}));
    std::vector<Cycle> body{first, Cycle{{Gate::make(GateKind::H, {oracle_qubit})}}};
    for (std::size_t i = 0; i < secret.size(); ++i) {
        if (secret[i] == '1') {
            body.push_back(Cycle{{Gate::make(GateKind::CNOT, {data_qubits[i], oracle_qubit})}});
        } else if (secret[i] != '0') {
            throw ValidationError("bv: secret must be a bitstring");
        }
    }
    body.push_back(hadamards);
    return Circuit::make(std::max(num_qubits, max_q + 1), std::move(body), data_qubits);
}

Eigen::Matrix2cd rx_matrix(double theta) {
    using C = std::complex<double>;
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    Eigen::Matrix2cd m;
    m << C(c, 0), C(0, -s), C(0, -s), C(c, 0);
    return m;
}

Eigen::MatrixXcd gate_unitary(const Gate &g) {
    using C = std::complex<double>;
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd m(2, 2);
    switch (g.kind) {
        case GateKind::H:
            m << r, r, r, -r;
            return m;
        case GateKind::X:
            m << 0, 1, 1, 0;
            return m;
        case GateKind::I:
            return Eigen::MatrixXcd::Identity(2, 2);
        case GateKind::RX90:
            return rx_matrix(M_PI / 2);
        case GateKind::RY90:
            m << r, -r, r, r;
            return m;
        case GateKind::RZ90:
            m << C(r, -r), 0, 0, C(r, r);
            return m;
        case GateKind::PAULI:
            return pauli_matrix(PauliString::single(1, 0, g.pauli));
        case GateKind::CNOT: {
            Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(4, 4);
            c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1;
            return c;
        }
        case GateKind::MEASURE:
            break;
    }
    throw ValidationError("measurement has no unitary");
}

bool is_clifford(GateKind kind) {
    return kind != GateKind::MEASURE;
}

namespace {

// Image of X, Y, Z (index 1..3) under single-qubit conjugation; negative means a sign flip.
struct LetterImage {
    std::array<char, 4> letter;
    std::array<bool, 4> negative;
};

LetterImage single_qubit_image(const Gate &g) {
    switch (g.kind) {
        case GateKind::H:
            return {{'I', 'Z', 'Y', 'X'}, {false, false, true, false}};
        case GateKind::RX90:
            return {{'I', 'X', 'Z', 'Y'}, {false, false, false, true}};
        case GateKind::RY90:
            return {{'I', 'Z', 'Y', 'X'}, {false, true, false, false}};
        case GateKind::RZ90:
            return {{'I', 'Y', 'X', 'Z'}, {false, false, true, false}};
        case GateKind::I:
            return {{'I', 'X', 'Y', 'Z'}, {false, false, false, false}};
        case GateKind::X:
        case GateKind::PAULI: {
            char a = g.kind == GateKind::X ? 'X' : g.pauli;
            LetterImage img{{'I', 'X', 'Y', 'Z'}, {false, false, false, false}};
            for (int l = 1; l < 4; ++l) {
                img.negative[l] = a != 'I' && a != "IXYZ"[l];
            }
            return img;
        }
        default:
            throw ValidationError("gate is not a single-qubit Clifford");
    }
}

int letter_code(char c) {
    return static_cast<int>(std::string_view("IXYZ").find(c));
}

}  // namespace

SignedPauli conjugate(const PauliString &p, const Gate &g) {
    SignedPauli out{p, false};
    for (int q : g.qubits) {
        if (q < 0 || static_cast<std::size_t>(q) >= p.num_qubits()) {
            throw ValidationError("conjugate: gate qubit outside the Pauli register");
        }
    }
    if (g.kind == GateKind::MEASURE) {
        throw ValidationError("conjugate: measurement is not unitary");
    }
    if (g.kind == GateKind::CNOT) {
        int c = g.qubits[0], t = g.qubits[1];
        bool xc = p.x(c), zc = p.z(c), xt = p.x(t), zt = p.z(t);
        out.negative = xc && zt && (xt == zc);
        bool nxt = xt != xc;
        bool nzc = zc != zt;
        auto letter = [](bool x, bool z) { return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I'); };
        out.pauli.set(c, letter(xc, nzc));
        out.pauli.set(t, letter(nxt, zt));
        return out;
    }
    int q = g.qubits[0];
    int l = letter_code(p.letter(q));
    if (l == 0) {
        return out;
    }
    LetterImage img = single_qubit_image(g);
    out.pauli.set(q, img.letter[l]);
    out.negative = img.negative[l];
    return out;
}

SignedPauli conjugate(const PauliString &p, const Cycle &c) {
    SignedPauli out{p, false};
    for (const auto &g : c.gates) {
        SignedPauli step = conjugate(out.pauli, g);
        out.pauli = step.pauli;
        out.negative = out.negative != step.negative;
    }
    return out;
}

json circuit_to_json(const Circuit &c) {
    json cycles = json::array();
    for (const auto &cycle : c.body()) {
        json gates = json::array();
        for (const auto &g : cycle.gates) {
            json jg = {{"kind", kind_name(g.kind)}, {"qubits", g.qubits}};
            if (g.hardness != Gate::make(g.kind, g.qubits).hardness) {
                jg["hardness"] = g.is_hard() ? "hard" : "easy";
            }
            if (g.kind == GateKind::PAULI) {
                jg["pauli"] = std::string(1, g.pauli);
            }
            gates.push_back(std::move(jg));
        }
        cycles.push_back(std::move(gates));
    }
    return {{"n_qubits", c.num_qubits}, {"cycles", std::move(cycles)}, {"measured", c.measured}};
}

Circuit circuit_from_json(const json &j) {
    if (!j.is_object() || !j.contains("n_qubits") || !j.contains("cycles")) {
        throw ValidationError("circuit: expected an object with n_qubits and cycles");
    }
    int n = j.at("n_qubits").get<int>();
    std::vector<int> measured = j.value("measured", std::vector<int>{});
    std::vector<Cycle> body;
    const auto &jc = j.at("cycles");
    for (std::size_t ci = 0; ci < jc.size(); ++ci) {
        Cycle cycle;
        for (const auto &jg : jc[ci]) {
            try {
                Gate g = Gate::make(parse_kind(jg.at("kind").get<std::string>()), jg.at("qubits").get<std::vector<int>>());
                if (jg.contains("hardness")) {
                    std::string h = jg.at("hardness").get<std::string>();
                    if (h != "hard" && h != "easy") {
                        throw ValidationError("hardness must be 'hard' or 'easy'");
                    }
                    g.hardness = h == "hard" ? Hardness::Hard : Hardness::Easy;
                }
                if (g.kind == GateKind::PAULI) {
                    std::string letter = jg.at("pauli").get<std::string>();
                    if (letter.size() != 1) {
                        throw ValidationError("pauli must be a single letter");
                    }
                    g.pauli = letter[0];
                }
                cycle.gates.push_back(std::move(g));
            } catch (const json::exception &e) {
                throw ValidationError(cycle_label(ci) + ": " + e.what());
            } catch (const ValidationError &e) {
                throw ValidationError(cycle_label(ci) + ": " + e.what());
            }
        }
        body.push_back(std::move(cycle));
    }
    // An explicit trailing measurement cycle is accepted when it matches `measured`.
    if (!body.empty() && body.back().is_measurement()) {
        std::vector<int> in_cycle;
        for (const auto &g : body.back().gates) {
            in_cycle.push_back(g.qubits[0]);
        }
        if (measured.empty()) {
            measured = in_cycle;
        }
        body.pop_back();
    }
    return Circuit::make(n, std::move(body), std::move(measured));
}

std::string serialize(const Circuit &c) {
    // One cycle per line so that errors can point at a cycle.
    json j = circuit_to_json(c);
    std::ostringstream out;
    out << "{\n  \"cycles\": [";
    const auto &cycles = j["cycles"];
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        out << (i ? ",\n    " : "\n    ") << cycles[i].dump();
    }
    out << (cycles.empty() ? "],\n" : "\n  ],\n");
    out << "  \"measured\": " << j["measured"].dump() << ",\n";
    out << "  \"n_qubits\": " << j["n_qubits"].dump() << "\n}\n";
    return out.str();
}

namespace {

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// Line on which element `k` of the top-level "cycles" array starts, or 0 if not found.
std::size_t cycle_line(std::string_view text, std::size_t k) {
    int depth = 0;
    bool in_string = false, escaped = false;
    bool in_cycles = false;
    int cycles_depth = -1;
    std::size_t index = 0;
    std::string last_key;
    std::size_t string_start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (ch == '\\') {
                escaped = true;
            } else if (ch == '"') {
                in_string = false;
                last_key = std::string(text.substr(string_start, i - string_start));
            }
            continue;
        }
        switch (ch) {
            case '"':
                in_string = true;
                string_start = i + 1;
                break;
            case '[':
            case '{':
                ++depth;
                if (!in_cycles && ch == '[' && depth == 2 && last_key == "cycles") {
                    in_cycles = true;
                    cycles_depth = depth;
                } else if (in_cycles && depth == cycles_depth + 1) {
                    if (index == k) {
                        return line_of_offset(text, i);
                    }
                    ++index;
                }
                break;
            case ']':
            case '}':
                if (in_cycles && depth == cycles_depth) {
                    in_cycles = false;
                }
                --depth;
                break;
            default:
                break;
        }
    }
    return 0;
}

}  // namespace

json parse_json_text(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        std::string what = e.what();
        auto pos = what.find("parse error");
        throw ParseError(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1),
                         pos == std::string::npos ? what : what.substr(pos));
    }
}

Circuit parse_circuit(std::string_view text) {
    json j = parse_json_text(text);
    try {
        return circuit_from_json(j);
    } catch (const ValidationError &e) {
        std::string msg = e.what();
        std::size_t line = 0;
        if (msg.rfind("cycle ", 0) == 0) {
            std::size_t k = std::stoul(msg.substr(6));
            line = cycle_line(text, k);
        }
        throw ParseError(line, msg);
    } catch (const json::exception &e) {
        throw ParseError(0, e.what());
    }
}

json topology_to_json(const Topology &t) {
    json edges = json::array();
    for (const auto &[a, b] : t.edges) {
        edges.push_back({a, b});
    }
    return {{"nodes", t.nodes}, {"edges", edges}};
}

Topology topology_from_json(const json &j) {
    Topology t;
    t.nodes = j.at("nodes").get<std::vector<int>>();
    for (const auto &e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) {
            throw ValidationError("topology: each edge must be [control, target]");
        }
        t.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    t.validate();
    return t;
}

json ghz_mapping_to_json(const GhzMapping &m) {
    json cnots = json::array();
    for (const auto &[c, t] : m.cnots) {
        cnots.push_back({c, t});
    }
    return {{"root", m.root}, {"cnots", cnots}};
}

GhzMapping ghz_mapping_from_json(const json &j) {
    GhzMapping m;
    m.root = j.at("root").get<int>();
    for (const auto &e : j.at("cnots")) {
        m.cnots.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    }
    return m;
}

json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_json_text(buf.str());
    } catch (const ParseError &e) {
        throw ParseError(e.line(), path + ": " + e.reason());
    }
}

void write_json_file(const std::string &path, const json &j) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out << j.dump(2) << "\n";
}

}  // namespace noisebench
