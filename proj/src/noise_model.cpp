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

#include "noisebench/noise_model.hpp"

#include <cmath>
#include <set>

#include "noisebench/error.hpp"

namespace noisebench {

using json = nlohmann::json;

std::string key_str(const GateKey &k) {
    std::string s(kind_name(k.kind));
    s += "(";
    for (std::size_t i = 0; i < k.qubits.size(); ++i) {
        s += (i ? "," : "") + std::to_string(k.qubits[i]);
    }
    return s + ")";
}

std::size_t channel_arity(const NoiseChannel &c) {
    if (const auto *p = std::get_if<PauliChannel>(&c)) {
        return p->num_qubits();
    }
    if (const auto *d = std::get_if<DepolarizingParams>(&c)) {
        return d->qubits.size();
    }
    return std::get<PTM>(c).num_qubits;
}

PauliChannel to_pauli_channel(const NoiseChannel &c, std::size_t arity) {
    if (const auto *p = std::get_if<PauliChannel>(&c)) {
        return *p;
    }
    if (const auto *d = std::get_if<DepolarizingParams>(&c)) {
        DepolarizingParams local{d->p, {}};
        for (std::size_t i = 0; i < arity; ++i) {
            local.qubits.push_back(static_cast<int>(i));
        }
        return depolarizing_to_pauli(local);
    }
    throw ValidationError("PTM noise has no Pauli-channel form");
}

void NoiseModel::set_channel(const GateKey &key, NoiseChannel channel) {
    if (key.qubits.size() != kind_arity(key.kind)) {
        throw ValidationError("noise model: " + key_str(key) + " has the wrong qubit count");
    }
    if (auto *d = std::get_if<DepolarizingParams>(&channel)) {
        if (d->qubits.empty()) {
            d->qubits = key.qubits;
        }
        if (!(d->p >= 0.0 && d->p <= 1.0)) {
            throw ValidationError("noise model: depolarizing p out of [0,1] for " + key_str(key));
        }
    }
    if (channel_arity(channel) != key.qubits.size()) {
        throw ValidationError("noise model: channel arity does not match " + key_str(key));
    }
    if (const auto *p = std::get_if<PTM>(&channel)) {
        std::size_t dim = std::size_t{1} << (2 * p->num_qubits);
        if (static_cast<std::size_t>(p->matrix.rows()) != dim || static_cast<std::size_t>(p->matrix.cols()) != dim) {
            throw ValidationError("noise model: PTM has the wrong dimension for " + key_str(key));
        }
    }
    channels_[key] = std::move(channel);
}

void NoiseModel::set_overrotation(const GateKey &key, double theta) {
    if (!std::isfinite(theta)) {
        throw ValidationError("noise model: non-finite over-rotation");
    }
    overrotations_[key] = theta;
}

void NoiseModel::set_readout(int qubit, ReadoutError r) {
    if (!(r.p0 >= 0 && r.p0 <= 1 && r.p1 >= 0 && r.p1 <= 1)) {
        throw ValidationError("noise model: readout error out of [0,1] on qubit " + std::to_string(qubit));
    }
    readout_[qubit] = r;
}

void NoiseModel::erase_channel(const GateKey &key) {
    channels_.erase(key);
}

const NoiseChannel *NoiseModel::channel(const GateKey &key) const {
    auto it = channels_.find(key);
    return it == channels_.end() ? nullptr : &it->second;
}

std::optional<PauliChannel> NoiseModel::pauli_channel(const GateKey &key) const {
    const NoiseChannel *c = channel(key);
    if (!c) {
        return std::nullopt;
    }
    return to_pauli_channel(*c, key.qubits.size());
}

double NoiseModel::overrotation(const GateKey &key) const {
    auto it = overrotations_.find(key);
    return it == overrotations_.end() ? 0.0 : it->second;
}

ReadoutError NoiseModel::readout(int qubit) const {
    auto it = readout_.find(qubit);
    return it == readout_.end() ? ReadoutError{} : it->second;
}

bool NoiseModel::has_ptm_noise() const {
    for (const auto &[k, c] : channels_) {
        if (std::holds_alternative<PTM>(c)) {
            return true;
        }
    }
    return false;
}

std::vector<GateKey> NoiseModel::uncovered(const Circuit &c, GateKind kind) const {
    std::set<GateKey> missing;
    for (const auto &cycle : c.body()) {
        for (const auto &g : cycle.gates) {
            if (g.kind == kind && !channel(GateKey::of(g))) {
                missing.insert(GateKey::of(g));
            }
        }
    }
    return {missing.begin(), missing.end()};
}

json pauli_channel_to_json(const PauliChannel &c) {
    json rates = json::object();
    for (const auto &[p, r] : c.rates()) {
        rates[p.str()] = r;
    }
    return rates;
}

PauliChannel pauli_channel_from_json(const json &j) {
    std::map<PauliString, double> rates;
    std::size_t n = 0;
    for (const auto &[k, v] : j.items()) {
        PauliString p = PauliString::from_str(k);
        n = p.num_qubits();
        rates[p] = v.get<double>();
    }
    if (rates.empty()) {
        throw ValidationError("pauli channel: no rates");
    }
    return PauliChannel(n, std::move(rates));
}

json ptm_to_json(const PTM &p) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < p.matrix.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < p.matrix.cols(); ++j) {
            row.push_back(p.matrix(i, j));
        }
        rows.push_back(std::move(row));
    }
    return {{"num_qubits", p.num_qubits}, {"matrix", rows}};
}

PTM ptm_from_json(const json &j) {
    PTM p;
    p.num_qubits = j.at("num_qubits").get<std::size_t>();
    const auto &rows = j.at("matrix");
    std::size_t dim = std::size_t{1} << (2 * p.num_qubits);
    if (rows.size() != dim) {
        throw ValidationError("ptm: expected " + std::to_string(dim) + " rows");
    }
    p.matrix.resize(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        if (rows[i].size() != dim) {
            throw ValidationError("ptm: row " + std::to_string(i) + " has the wrong length");
        }
        for (std::size_t k = 0; k < dim; ++k) {
            p.matrix(i, k) = rows[i][k].get<double>();
        }
    }
    return p;
}

json channel_to_json(const NoiseChannel &c) {
    if (const auto *p = std::get_if<PauliChannel>(&c)) {
        return {{"type", "pauli"}, {"rates", pauli_channel_to_json(*p)}};
    }
    if (const auto *d = std::get_if<DepolarizingParams>(&c)) {
        return {{"type", "depolarizing"}, {"p", d->p}};
    }
    json j = ptm_to_json(std::get<PTM>(c));
    j["type"] = "ptm";
    return j;
}

NoiseChannel channel_from_json(const json &j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "pauli") {
        return pauli_channel_from_json(j.at("rates"));
    }
    if (type == "depolarizing") {
        return DepolarizingParams{j.at("p").get<double>(), {}};
    }
    if (type == "ptm") {
        return ptm_from_json(j);
    }
    throw ValidationError("unknown channel type '" + type + "'");
}

json noise_model_to_json(const NoiseModel &m) {
    json gates = json::array();
    for (const auto &[k, c] : m.channels()) {
        gates.push_back({{"kind", kind_name(k.kind)}, {"qubits", k.qubits}, {"channel", channel_to_json(c)}});
    }
    json over = json::array();
    for (const auto &[k, theta] : m.overrotations()) {
        over.push_back({{"kind", kind_name(k.kind)}, {"qubits", k.qubits}, {"theta", theta}});
    }
    json readout = json::object();
    for (const auto &[q, r] : m.readouts()) {
        readout[std::to_string(q)] = {{"p0", r.p0}, {"p1", r.p1}};
    }
    return {{"gates", gates}, {"overrotation", over}, {"readout", readout}};
}

NoiseModel noise_model_from_json(const json &j) {
    NoiseModel m;
    for (const auto &g : j.value("gates", json::array())) {
        GateKey key{parse_kind(g.at("kind").get<std::string>()), g.at("qubits").get<std::vector<int>>()};
        m.set_channel(key, channel_from_json(g.at("channel")));
    }
    for (const auto &o : j.value("overrotation", json::array())) {
        GateKey key{parse_kind(o.at("kind").get<std::string>()), o.at("qubits").get<std::vector<int>>()};
        m.set_overrotation(key, o.at("theta").get<double>());
    }
    const json readout = j.value("readout", json::object());
    for (const auto &[q, r] : readout.items()) {
        m.set_readout(std::stoi(q), {r.at("p0").get<double>(), r.at("p1").get<double>()});
    }
    return m;
}

}  // namespace noisebench
