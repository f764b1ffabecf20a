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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "noisebench/error.hpp"
#include "noisebench/parallel.hpp"
#include "noisebench/pauli.hpp"
#include "noisebench/rng.hpp"

namespace noisebench {

using json = nlohmann::json;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::size_t dim_of(std::size_t n) {
    return std::size_t{1} << (2 * n);
}

std::size_t outcomes_of(std::size_t n) {
    return std::size_t{1} << n;
}

// Operator on n qubits from `u` acting on local `qubits`; qubit 0 is the most significant bit.
MatrixXcd embed(const MatrixXcd &u, const std::vector<int> &qubits, std::size_t n) {
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    MatrixXcd out = MatrixXcd::Zero(dim, dim);
    auto bit = [n](Eigen::Index idx, int q) { return (idx >> (n - 1 - static_cast<std::size_t>(q))) & 1; };
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            bool same = true;
            for (std::size_t q = 0; q < n; ++q) {
                bool acted = std::find(qubits.begin(), qubits.end(), static_cast<int>(q)) != qubits.end();
                if (!acted && bit(r, static_cast<int>(q)) != bit(c, static_cast<int>(q))) {
                    same = false;
                }
            }
            if (!same) {
                continue;
            }
            Eigen::Index lr = 0, lc = 0;
            for (int q : qubits) {
                lr = (lr << 1) | bit(r, q);
                lc = (lc << 1) | bit(c, q);
            }
            out(r, c) = u(lr, lc);
        }
    }
    return out;
}

VectorXd ideal_rho(std::size_t n) {
    VectorXd r = VectorXd::Zero(static_cast<Eigen::Index>(dim_of(n)));
    auto paulis = all_paulis(n);
    for (std::size_t i = 0; i < paulis.size(); ++i) {
        bool diag = true;
        for (std::size_t q = 0; q < n; ++q) {
            char l = paulis[i].letter(q);
            diag = diag && (l == 'I' || l == 'Z');
        }
        r(static_cast<Eigen::Index>(i)) = diag ? 1.0 : 0.0;
    }
    return r;
}

// Row o: Pauli components of the projector onto outcome o, divided by d.
MatrixXd ideal_effects(std::size_t n) {
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
    auto paulis = all_paulis(n);
    MatrixXd e = MatrixXd::Zero(static_cast<Eigen::Index>(outcomes_of(n)), static_cast<Eigen::Index>(paulis.size()));
    for (std::size_t o = 0; o < outcomes_of(n); ++o) {
        for (std::size_t i = 0; i < paulis.size(); ++i) {
            double v = 1.0;
            for (std::size_t q = 0; q < n; ++q) {
                char l = paulis[i].letter(q);
                int b = static_cast<int>((o >> (n - 1 - q)) & 1);
                v *= l == 'I' ? 1.0 : l == 'Z' ? (b ? -1.0 : 1.0) : 0.0;
            }
            e(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i)) = v / static_cast<double>(d);
        }
    }
    return e;
}

std::string describe_direction(const VectorXd &v, std::size_t n) {
    auto paulis = all_paulis(n);
    std::ostringstream s;
    bool first = true;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-6) {
            s << (first ? "" : " + ") << v(i) << "*" << paulis[static_cast<std::size_t>(i)].str();
            first = false;
        }
    }
    return s.str();
}

// Target matrices: A_t rows (i, o) = E_o F_i, B_t columns j = F_j rho.
struct Targets {
    MatrixXd a, b;
};

Targets target_matrices(const GateSet &gs) {
    const std::size_t n = gs.num_qubits, nf = gs.fiducials.size(), no = outcomes_of(n);
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    Targets t{MatrixXd(static_cast<Eigen::Index>(nf * no), d), MatrixXd(d, static_cast<Eigen::Index>(nf))};
    VectorXd rho = ideal_rho(n);
    MatrixXd e = ideal_effects(n);
    for (std::size_t f = 0; f < nf; ++f) {
        MatrixXd ptm = ideal_ptm(gs.fiducials[f], n);
        t.b.col(static_cast<Eigen::Index>(f)) = ptm * rho;
        t.a.middleRows(static_cast<Eigen::Index>(f * no), static_cast<Eigen::Index>(no)) = e * ptm;
    }
    return t;
}

std::string gate_label(const std::string &kind, const std::vector<int> &qubits) {
    std::string s = kind + ":";
    for (std::size_t k = 0; k < qubits.size(); ++k) {
        s += (k ? "," : "") + std::to_string(qubits[k]);
    }
    return s;
}

json gate_to_json(const Gate &g) {
    return {{"kind", kind_name(g.kind)}, {"qubits", g.qubits}};
}

Gate gate_from_json(const json &j) {
    return Gate::make(parse_kind(j.at("kind").get<std::string>()), j.at("qubits").get<std::vector<int>>());
}

json ops_to_json(const std::vector<Gate> &ops) {
    json a = json::array();
    for (const auto &g : ops) {
        a.push_back(gate_to_json(g));
    }
    return a;
}

std::vector<Gate> ops_from_json(const json &j) {
    std::vector<Gate> out;
    for (const auto &g : j) {
        out.push_back(gate_from_json(g));
    }
    return out;
}

json matrix_to_json(const MatrixXd &m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(row);
    }
    return rows;
}

MatrixXd matrix_from_json(const json &j) {
    auto rows = static_cast<Eigen::Index>(j.size());
    auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
    MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != cols) {
            throw ValidationError("matrix: ragged rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

}  // namespace

MatrixXd ideal_ptm(const std::vector<Gate> &ops, std::size_t num_qubits) {
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << num_qubits);
    MatrixXcd u = MatrixXcd::Identity(dim, dim);
    for (const auto &g : ops) {
        for (int q : g.qubits) {
            if (q < 0 || static_cast<std::size_t>(q) >= num_qubits) {
                throw ValidationError("gst: operation on qubit " + std::to_string(q) + " outside the gate set");
            }
        }
        u = embed(gate_unitary(g), g.qubits, num_qubits) * u;
    }
    return ptm_of_unitary(u).matrix;
}

void GateSet::validate() const {
    if (num_qubits < 1 || num_qubits > 2) {
        throw ValidationError("gst: gate sets cover one or two qubits");
    }
    if (fiducial_labels.size() != fiducials.size()) {
        throw ValidationError("gst: fiducial labels do not match fiducials");
    }
    if (std::none_of(gates.begin(), gates.end(), [](const GstGate &g) { return g.ops.empty(); })) {
        throw ValidationError("gst: gate set needs the empty gate {}");
    }
    if (std::none_of(fiducials.begin(), fiducials.end(), [](const auto &f) { return f.empty(); })) {
        throw ValidationError("gst: fiducials need the empty sequence");
    }
    Targets t = target_matrices(*this);
    const auto d = static_cast<Eigen::Index>(dim_of(num_qubits));
    for (int side = 0; side < 2; ++side) {
        MatrixXd m = side == 0 ? MatrixXd(t.b) : MatrixXd(t.a.transpose());
        Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullU);
        svd.setThreshold(1e-10);
        if (svd.rank() < d) {
            VectorXd dir = svd.matrixU().col(d - 1);
            throw ValidationError(std::string("gst: ") + (side == 0 ? "preparation" : "measurement") +
                                  " fiducials are not informationally complete; missing direction " +
                                  describe_direction(dir, num_qubits));
        }
    }
}

GateSet standard_gate_set(std::size_t num_qubits) {
    if (num_qubits < 1 || num_qubits > 2) {
        throw ValidationError("gst: standard gate sets cover one or two qubits");
    }
    GateSet gs;
    gs.num_qubits = num_qubits;
    gs.gates.push_back({"{}", {}});
    for (GateKind k : {GateKind::RX90, GateKind::RY90, GateKind::RZ90, GateKind::I}) {
        for (int q = 0; q < static_cast<int>(num_qubits); ++q) {
            gs.gates.push_back({gate_label(std::string(kind_name(k)), {q}), {Gate::make(k, {q})}});
        }
    }
    if (num_qubits == 2) {
        gs.gates.push_back({"CNOT:0,1", {Gate::make(GateKind::CNOT, {0, 1})}});
    }
    const std::vector<std::pair<std::string, std::vector<GateKind>>> single{
        {"{}", {}},
        {"X90", {GateKind::RX90}},
        {"Y90", {GateKind::RY90}},
        {"X90X90", {GateKind::RX90, GateKind::RX90}},
        {"X90X90X90", {GateKind::RX90, GateKind::RX90, GateKind::RX90}},
        {"Y90Y90Y90", {GateKind::RY90, GateKind::RY90, GateKind::RY90}},
    };
    auto ops_on = [](const std::vector<GateKind> &kinds, int q) {
        std::vector<Gate> ops;
        for (GateKind k : kinds) {
            ops.push_back(Gate::make(k, {q}));
        }
        return ops;
    };
    if (num_qubits == 1) {
        for (const auto &[label, kinds] : single) {
            gs.fiducials.push_back(ops_on(kinds, 0));
            gs.fiducial_labels.push_back(label);
        }
    } else {
        for (const auto &[l0, k0] : single) {
            for (const auto &[l1, k1] : single) {
                auto ops = ops_on(k0, 0);
                auto more = ops_on(k1, 1);
                ops.insert(ops.end(), more.begin(), more.end());
                gs.fiducials.push_back(ops);
                gs.fiducial_labels.push_back(l0 + "|" + l1);
            }
        }
    }
    return gs;
}

std::vector<Circuit> GstDesign::circuits() const {
    std::vector<Circuit> out;
    out.reserve(entries.size());
    for (const auto &e : entries) {
        out.push_back(e.circuit);
    }
    return out;
}

GstDesign design_gst(const GateSet &gs, const std::vector<int> &qubits) {
    gs.validate();
    if (qubits.size() != gs.num_qubits) {
        throw ValidationError("gst: need one device qubit per gate-set qubit");
    }
    const int reg = *std::max_element(qubits.begin(), qubits.end()) + 1;
    auto place = [&](const std::vector<Gate> &ops, std::vector<Cycle> &body) {
        for (const auto &g : ops) {
            std::vector<int> dq;
            for (int q : g.qubits) {
                dq.push_back(qubits[static_cast<std::size_t>(q)]);
            }
            body.push_back(Cycle{{Gate::make(g.kind, dq)}});
        }
    };
    GstDesign d{gs, qubits, {}};
    const int nf = static_cast<int>(gs.fiducials.size());
    for (int i = 0; i < nf; ++i) {
        for (int j = 0; j < nf; ++j) {
            for (int k = 0; k < static_cast<int>(gs.gates.size()); ++k) {
                std::vector<Cycle> body;
                place(gs.fiducials[static_cast<std::size_t>(j)], body);
                place(gs.gates[static_cast<std::size_t>(k)].ops, body);
                place(gs.fiducials[static_cast<std::size_t>(i)], body);
                d.entries.push_back({i, j, k, Circuit::make(reg, std::move(body), qubits)});
            }
        }
    }
    for (int i = 0; i < nf; ++i) {
        std::vector<Cycle> body;
        place(gs.fiducials[static_cast<std::size_t>(i)], body);
        d.entries.push_back({i, -1, -1, Circuit::make(reg, std::move(body), qubits)});
    }
    return d;
}

namespace {

std::vector<double> frequencies(const std::map<std::string, double> &probs, std::size_t n) {
    std::vector<double> v(outcomes_of(n), 0.0);
    for (const auto &[k, p] : probs) {
        if (k.size() != n) {
            throw ValidationError("gst: outcome " + k + " has the wrong width");
        }
        v[std::stoul(k, nullptr, 2)] += p;
    }
    return v;
}

}  // namespace

GstDataset collect(const GstDesign &design, const std::vector<Counts> &counts) {
    if (counts.size() != design.entries.size()) {
        throw ValidationError("gst: " + std::to_string(counts.size()) + " results for " +
                              std::to_string(design.entries.size()) + " design sequences");
    }
    GstDataset ds;
    ds.num_qubits = design.gate_set.num_qubits;
    for (std::size_t idx = 0; idx < counts.size(); ++idx) {
        const auto &e = design.entries[idx];
        ds.m[{e.i, e.j, e.k}] = frequencies(counts[idx].normalized().probs, ds.num_qubits);
        ds.shots = std::max(ds.shots, counts[idx].shots);
    }
    return ds;
}

GstDataset synthetic_dataset(const GstDesign &design, const NoiseModel &noise, std::uint64_t shots,
                             std::uint64_t seed) {
    GstDataset ds;
    ds.num_qubits = design.gate_set.num_qubits;
    ds.shots = shots;
    std::vector<std::vector<double>> freqs(design.entries.size());
    parallel_for(design.entries.size(), [&](std::size_t idx) {
        Distribution d = run_exact(design.entries[idx].circuit, &noise);
        if (shots > 0) {
            d = sample_counts(d, shots, derive_seed(seed, idx)).normalized();
        }
        freqs[idx] = frequencies(d.probs, ds.num_qubits);
    });
    for (std::size_t idx = 0; idx < freqs.size(); ++idx) {
        const auto &e = design.entries[idx];
        ds.m[{e.i, e.j, e.k}] = std::move(freqs[idx]);
    }
    return ds;
}

GstEstimate ideal_estimate(const GateSet &gs) {
    GstEstimate e;
    e.num_qubits = gs.num_qubits;
    for (const auto &g : gs.gates) {
        e.gates[g.label] = ideal_ptm(g.ops, gs.num_qubits);
    }
    e.rho = ideal_rho(gs.num_qubits);
    e.effects = ideal_effects(gs.num_qubits);
    const auto d = static_cast<Eigen::Index>(dim_of(gs.num_qubits));
    e.gauge = MatrixXd::Identity(d, d);
    e.condition_number = 1.0;
    return e;
}

GstEstimate lgst_reconstruct(const GstDataset &ds, const GateSet &gs) {
    gs.validate();
    if (ds.num_qubits != gs.num_qubits) {
        throw ValidationError("gst: dataset and gate set cover different qubit counts");
    }
    const std::size_t n = gs.num_qubits, no = outcomes_of(n);
    const auto nf = static_cast<int>(gs.fiducials.size());
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    auto lookup = [&](int i, int j, int k) -> const std::vector<double> & {
        auto it = ds.m.find({i, j, k});
        if (it == ds.m.end()) {
            throw ValidationError("gst: dataset is missing sequence (" + std::to_string(i) + "," + std::to_string(j) +
                                  "," + std::to_string(k) + ")");
        }
        if (it->second.size() != no) {
            throw ValidationError("gst: sequence has the wrong number of outcomes");
        }
        return it->second;
    };
    auto data_matrix = [&](int k) {
        MatrixXd p(static_cast<Eigen::Index>(nf * static_cast<int>(no)), nf);
        for (int i = 0; i < nf; ++i) {
            for (int j = 0; j < nf; ++j) {
                const auto &v = lookup(i, j, k);
                for (std::size_t o = 0; o < no; ++o) {
                    p(static_cast<Eigen::Index>(static_cast<std::size_t>(i) * no + o), j) = v[o];
                }
            }
        }
        return p;
    };
    const auto empty_gate = static_cast<int>(
        std::find_if(gs.gates.begin(), gs.gates.end(), [](const GstGate &g) { return g.ops.empty(); }) -
        gs.gates.begin());
    const auto empty_fid = static_cast<Eigen::Index>(
        std::find_if(gs.fiducials.begin(), gs.fiducials.end(), [](const auto &f) { return f.empty(); }) -
        gs.fiducials.begin());
    Targets t = target_matrices(gs);
    MatrixXd gram = data_matrix(empty_gate);
    MatrixXd x = t.a.transpose() * gram * t.b.transpose();
    Eigen::JacobiSVD<MatrixXd> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto &sv = svd.singularValues();
    GstEstimate est;
    est.num_qubits = n;
    est.condition_number = sv(d - 1) > 0 ? sv(0) / sv(d - 1) : INFINITY;
    if (!(sv(d - 1) > 1e-10 * sv(0))) {
        std::ostringstream s;
        s << "gst: fiducial Gram matrix is singular (condition number " << est.condition_number << ")";
        throw ValidationError(s.str());
    }
    svd.setThreshold(1e-10);
    MatrixXd q = t.b * t.b.transpose();
    MatrixXd q_inv = q.inverse();
    for (int k = 0; k < static_cast<int>(gs.gates.size()); ++k) {
        MatrixXd y = t.a.transpose() * data_matrix(k) * t.b.transpose();
        est.gates[gs.gates[static_cast<std::size_t>(k)].label] = q * svd.solve(y) * q_inv;
    }
    VectorXd p(static_cast<Eigen::Index>(nf * static_cast<int>(no)));
    for (int i = 0; i < nf; ++i) {
        const auto &v = lookup(i, -1, -1);
        for (std::size_t o = 0; o < no; ++o) {
            p(static_cast<Eigen::Index>(static_cast<std::size_t>(i) * no + o)) = v[o];
        }
    }
    est.rho = q * svd.solve(MatrixXd(t.a.transpose() * p));
    est.effects = MatrixXd(static_cast<Eigen::Index>(no), d);
    for (std::size_t o = 0; o < no; ++o) {
        auto row = gram.row(empty_fid * static_cast<Eigen::Index>(no) + static_cast<Eigen::Index>(o));
        est.effects.row(static_cast<Eigen::Index>(o)) = row * t.b.transpose() * q_inv;
    }
    est.gauge = MatrixXd::Identity(d, d);
    return est;
}

namespace {

struct GaugeProblem {
    std::vector<MatrixXd> raw, ideal;
    VectorXd rho, rho_t;
    MatrixXd eff, eff_t;

    double value(const MatrixXd &t, MatrixXd *grad) const {
        Eigen::FullPivLU<MatrixXd> lu(t);
        if (!lu.isInvertible()) {
            return INFINITY;
        }
        MatrixXd ti = lu.inverse();
        double f = 0;
        if (grad) {
            grad->setZero(t.rows(), t.cols());
        }
        for (std::size_t k = 0; k < raw.size(); ++k) {
            MatrixXd gti = raw[k] * ti;
            MatrixXd nk = t * gti;
            MatrixXd r = nk - ideal[k];
            f += r.squaredNorm();
            if (grad) {
                *grad += 2 * (r * gti.transpose() - nk.transpose() * r * ti.transpose());
            }
        }
        VectorXd rr = t * rho - rho_t;
        f += rr.squaredNorm();
        MatrixXd eti = eff * ti;
        MatrixXd u = eti - eff_t;
        f += u.squaredNorm();
        if (grad) {
            *grad += 2 * rr * rho.transpose();
            *grad -= 2 * eti.transpose() * u * ti.transpose();
        }
        return f;
    }
};

}  // namespace

GstEstimate gauge_fix(const GstEstimate &raw, const GateSet &target, const GaugeOptions &opts) {
    GstEstimate ideal = ideal_estimate(target);
    GaugeProblem prob;
    for (const auto &g : target.gates) {
        if (g.ops.empty()) {
            continue;
        }
        auto it = raw.gates.find(g.label);
        if (it == raw.gates.end()) {
            throw ValidationError("gauge_fix: estimate has no gate " + g.label);
        }
        prob.raw.push_back(it->second);
        prob.ideal.push_back(ideal.gates.at(g.label));
    }
    prob.rho = raw.rho;
    prob.rho_t = ideal.rho;
    prob.eff = raw.effects;
    prob.eff_t = ideal.effects;

    const Eigen::Index d = raw.rho.size();
    const Eigen::Index nv = d * d;
    MatrixXd t = MatrixXd::Identity(d, d);
    MatrixXd g;
    double f = prob.value(t, &g);
    MatrixXd h = MatrixXd::Identity(nv, nv);
    bool converged = false;
    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        Eigen::Map<const VectorXd> gv(g.data(), nv);
        if (gv.norm() < 1e-15 || f < opts.tolerance) {
            converged = true;
            break;
        }
        VectorXd dir = -h * gv;
        if (dir.dot(gv) >= 0) {
            h.setIdentity();
            dir = -gv;
        }
        double step = 1.0;
        MatrixXd t_new, g_new;
        double f_new = INFINITY;
        for (int ls = 0; ls < 60; ++ls) {
            t_new = t + Eigen::Map<const MatrixXd>(dir.data(), d, d) * step;
            f_new = prob.value(t_new, &g_new);
            if (f_new <= f + 1e-4 * step * dir.dot(gv)) {
                break;
            }
            step *= 0.5;
        }
        if (!(f_new <= f)) {
            // No descent along the search direction: stationary to working precision.
            converged = gv.norm() < 1e-6 * std::max(1.0, f);
            break;
        }
        VectorXd s = Eigen::Map<const VectorXd>(t_new.data(), nv) - Eigen::Map<const VectorXd>(t.data(), nv);
        VectorXd y = Eigen::Map<const VectorXd>(g_new.data(), nv) - gv;
        double sy = s.dot(y);
        double prev = f;
        t = t_new;
        g = g_new;
        f = f_new;
        if (sy > 1e-300) {
            VectorXd hy = h * y;
            double rho_k = 1.0 / sy;
            h += (rho_k * rho_k * y.dot(hy) + rho_k) * (s * s.transpose()) -
                 rho_k * (hy * s.transpose() + s * hy.transpose());
        }
        if (prev - f <= 1e-16 * std::max(1.0, prev)) {
            converged = true;
            ++iter;
            break;
        }
    }
    if (!converged) {
        GstEstimate out = raw;
        out.gauge_converged = false;
        out.gauge_iterations = iter;
        out.gauge_residual = std::sqrt(prob.value(MatrixXd::Identity(d, d), nullptr));
        return out;
    }
    MatrixXd ti = t.inverse();
    GstEstimate out = raw;
    for (auto &[label, m] : out.gates) {
        m = t * m * ti;
    }
    out.rho = t * raw.rho;
    out.effects = raw.effects * ti;
    out.gauge = t;
    out.gauge_residual = std::sqrt(f);
    out.gauge_iterations = iter;
    out.gauge_converged = true;
    return out;
}

std::vector<Circuit> spam_circuits(const std::vector<int> &qubits, int num_qubits) {
    if (qubits.empty()) {
        throw ValidationError("spam_circuits: no qubits");
    }
    int reg = std::max(num_qubits, *std::max_element(qubits.begin(), qubits.end()) + 1);
    std::vector<Circuit> out;
    const std::size_t n = qubits.size();
    for (std::size_t e = 0; e < (std::size_t{1} << n); ++e) {
        Cycle c;
        for (std::size_t q = 0; q < n; ++q) {
            if ((e >> (n - 1 - q)) & 1) {
                c.gates.push_back(Gate::make(GateKind::X, {qubits[q]}));
            }
        }
        std::vector<Cycle> body;
        if (!c.gates.empty()) {
            body.push_back(c);
        }
        out.push_back(Circuit::make(reg, std::move(body), qubits));
    }
    return out;
}

MatrixXd spam_matrix(const std::vector<Counts> &counts) {
    const auto rows = static_cast<Eigen::Index>(counts.size());
    std::size_t n = 0;
    while ((std::size_t{1} << n) < counts.size()) {
        ++n;
    }
    if ((std::size_t{1} << n) != counts.size()) {
        throw ValidationError("spam_matrix: need one result per basis state");
    }
    MatrixXd m = MatrixXd::Zero(rows, rows);
    for (Eigen::Index e = 0; e < rows; ++e) {
        auto f = frequencies(counts[static_cast<std::size_t>(e)].normalized().probs, n);
        for (Eigen::Index o = 0; o < rows; ++o) {
            m(e, o) = f[static_cast<std::size_t>(o)];
        }
    }
    return m;
}

MatrixXd spam_matrix(const GstEstimate &est) {
    const std::size_t n = est.num_qubits, no = outcomes_of(n);
    MatrixXd m(static_cast<Eigen::Index>(no), static_cast<Eigen::Index>(no));
    for (std::size_t e = 0; e < no; ++e) {
        VectorXd r = est.rho;
        for (std::size_t q = 0; q < n; ++q) {
            if ((e >> (n - 1 - q)) & 1) {
                const MatrixXd &x = est.gates.at(gate_label("RX90", {static_cast<int>(q)}));
                r = x * (x * r);
            }
        }
        VectorXd p = est.effects * r;
        for (std::size_t o = 0; o < no; ++o) {
            m(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(o)) = std::max(0.0, p(static_cast<Eigen::Index>(o)));
        }
        m.row(static_cast<Eigen::Index>(e)) /= m.row(static_cast<Eigen::Index>(e)).sum();
    }
    return m;
}

Distribution simulate_gst_model(const GstEstimate &est, const Circuit &c, const std::vector<int> &qubits) {
    c.validate();
    const std::size_t n = est.num_qubits;
    if (qubits.size() != n) {
        throw ValidationError("simulate_gst_model: need one device qubit per estimate qubit");
    }
    auto local = [&](int q) {
        auto it = std::find(qubits.begin(), qubits.end(), q);
        if (it == qubits.end()) {
            throw ValidationError("simulate_gst_model: qubit " + std::to_string(q) + " is outside the estimate");
        }
        return static_cast<int>(it - qubits.begin());
    };
    auto apply = [&](VectorXd &r, const std::string &kind, std::vector<int> lq) {
        std::string label = gate_label(kind, lq);
        auto it = est.gates.find(label);
        if (it == est.gates.end()) {
            throw ValidationError("simulate_gst_model: estimate has no gate " + label);
        }
        r = it->second * r;
    };
    VectorXd r = est.rho;
    for (const auto &cycle : c.body()) {
        for (const auto &g : cycle.gates) {
            std::vector<int> lq;
            for (int q : g.qubits) {
                lq.push_back(local(q));
            }
            std::vector<std::string> seq;
            switch (g.kind) {
                case GateKind::H:
                    seq = {"RZ90", "RZ90", "RY90"};
                    break;
                case GateKind::X:
                    seq = {"RX90", "RX90"};
                    break;
                case GateKind::PAULI:
                    if (g.pauli == 'X') {
                        seq = {"RX90", "RX90"};
                    } else if (g.pauli == 'Y') {
                        seq = {"RY90", "RY90"};
                    } else if (g.pauli == 'Z') {
                        seq = {"RZ90", "RZ90"};
                    }
                    break;
                default:
                    seq = {std::string(kind_name(g.kind))};
            }
            for (const auto &k : seq) {
                apply(r, k, lq);
            }
        }
    }
    VectorXd p = est.effects * r;
    Distribution local_dist;
    double total = 0;
    for (Eigen::Index o = 0; o < p.size(); ++o) {
        double v = std::max(0.0, p(o));
        if (v > 0) {
            std::string key;
            for (std::size_t q = 0; q < n; ++q) {
                key += ((static_cast<std::size_t>(o) >> (n - 1 - q)) & 1) ? '1' : '0';
            }
            local_dist.probs[key] = v;
            total += v;
        }
    }
    for (auto &[k, v] : local_dist.probs) {
        v /= total;
    }
    std::vector<int> positions;
    for (int q : c.measured) {
        positions.push_back(local(q));
    }
    return marginal(local_dist, positions);
}

json gst_design_to_json(const GstDesign &d) {
    json gates = json::array();
    for (const auto &g : d.gate_set.gates) {
        gates.push_back({{"label", g.label}, {"ops", ops_to_json(g.ops)}});
    }
    json fids = json::array();
    for (std::size_t f = 0; f < d.gate_set.fiducials.size(); ++f) {
        fids.push_back({{"label", d.gate_set.fiducial_labels[f]}, {"ops", ops_to_json(d.gate_set.fiducials[f])}});
    }
    json entries = json::array();
    for (const auto &e : d.entries) {
        entries.push_back({{"i", e.i}, {"j", e.j}, {"k", e.k}});
    }
    return {{"num_qubits", d.gate_set.num_qubits},
            {"qubits", d.qubits},
            {"gates", gates},
            {"fiducials", fids},
            {"entries", entries}};
}

GstDesign gst_design_from_json(const json &j) {
    GateSet gs;
    gs.num_qubits = j.at("num_qubits").get<std::size_t>();
    for (const auto &g : j.at("gates")) {
        gs.gates.push_back({g.at("label").get<std::string>(), ops_from_json(g.at("ops"))});
    }
    for (const auto &f : j.at("fiducials")) {
        gs.fiducial_labels.push_back(f.at("label").get<std::string>());
        gs.fiducials.push_back(ops_from_json(f.at("ops")));
    }
    GstDesign d = design_gst(gs, j.at("qubits").get<std::vector<int>>());
    if (j.contains("entries") && j.at("entries").size() != d.entries.size()) {
        throw ValidationError("gst design: entry count does not match the gate set");
    }
    return d;
}

json gst_estimate_to_json(const GstEstimate &e) {
    json gates = json::object();
    for (const auto &[label, m] : e.gates) {
        gates[label] = matrix_to_json(m);
    }
    std::vector<double> rho(e.rho.data(), e.rho.data() + e.rho.size());
    return {{"num_qubits", e.num_qubits},
            {"gates", gates},
            {"rho", rho},
            {"effects", matrix_to_json(e.effects)},
            {"spam", matrix_to_json(spam_matrix(e))},
            {"gauge", matrix_to_json(e.gauge)},
            {"condition_number", e.condition_number},
            {"gauge_residual", e.gauge_residual},
            {"gauge_iterations", e.gauge_iterations},
            {"gauge_converged", e.gauge_converged}};
}

GstEstimate gst_estimate_from_json(const json &j) {
    GstEstimate e;
    e.num_qubits = j.at("num_qubits").get<std::size_t>();
    for (const auto &[label, m] : j.at("gates").items()) {
        e.gates[label] = matrix_from_json(m);
    }
    auto rho = j.at("rho").get<std::vector<double>>();
    e.rho = Eigen::Map<VectorXd>(rho.data(), static_cast<Eigen::Index>(rho.size()));
    e.effects = matrix_from_json(j.at("effects"));
    e.gauge = matrix_from_json(j.at("gauge"));
    e.condition_number = j.value("condition_number", 0.0);
    e.gauge_residual = j.value("gauge_residual", 0.0);
    e.gauge_iterations = j.value("gauge_iterations", 0);
    e.gauge_converged = j.value("gauge_converged", true);
    return e;
}

}  // namespace noisebench
