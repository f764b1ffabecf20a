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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <unordered_map>

#include "noisebench/error.hpp"
#include "noisebench/rng.hpp"

namespace noisebench {

using json = nlohmann::json;
using cplx = std::complex<double>;

double Distribution::at(const std::string &bits) const {
    auto it = probs.find(bits);
    return it == probs.end() ? 0.0 : it->second;
}

double Distribution::total() const {
    double s = 0;
    for (const auto &[k, p] : probs) {
        s += p;
    }
    return s;
}

void Distribution::validate() const {
    if (probs.empty()) {
        throw ValidationError("distribution: empty");
    }
    std::size_t len = probs.begin()->first.size();
    for (const auto &[k, p] : probs) {
        if (k.size() != len || k.find_first_not_of("01") != std::string::npos) {
            throw ValidationError("distribution: malformed bitstring '" + k + "'");
        }
        if (!(p >= -1e-12)) {
            throw ValidationError("distribution: negative probability for " + k);
        }
    }
    if (std::abs(total() - 1.0) > 1e-9) {
        throw ValidationError("distribution: probabilities sum to " + std::to_string(total()));
    }
}

std::uint64_t Counts::at(const std::string &bits) const {
    auto it = counts.find(bits);
    return it == counts.end() ? 0 : it->second;
}

Distribution Counts::normalized() const {
    if (shots == 0) {
        throw ValidationError("counts: zero shots");
    }
    Distribution d;
    for (const auto &[k, n] : counts) {
        d.probs[k] = static_cast<double>(n) / static_cast<double>(shots);
    }
    return d;
}

namespace {

// Applies a 2^k x 2^k matrix to the listed bit positions; positions[0] is the most significant.
void apply_dense(std::vector<cplx> &v, const Eigen::MatrixXcd &m, std::span<const int> positions) {
    const std::size_t k = positions.size();
    const std::size_t dim = std::size_t{1} << k;
    std::vector<std::size_t> offset(dim, 0);
    std::size_t mask = 0;
    for (std::size_t j = 0; j < k; ++j) {
        mask |= std::size_t{1} << positions[j];
    }
    for (std::size_t s = 0; s < dim; ++s) {
        for (std::size_t j = 0; j < k; ++j) {
            if ((s >> (k - 1 - j)) & 1u) {
                offset[s] |= std::size_t{1} << positions[j];
            }
        }
    }
    std::vector<cplx> in(dim), out(dim);
    for (std::size_t base = 0; base < v.size(); ++base) {
        if (base & mask) {
            continue;
        }
        for (std::size_t s = 0; s < dim; ++s) {
            in[s] = v[base | offset[s]];
        }
        for (std::size_t r = 0; r < dim; ++r) {
            cplx acc = 0;
            for (std::size_t s = 0; s < dim; ++s) {
                acc += m(r, s) * in[s];
            }
            out[r] = acc;
        }
        for (std::size_t s = 0; s < dim; ++s) {
            v[base | offset[s]] = out[s];
        }
    }
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Eigen::MatrixXcd superop_of_unitary(const Eigen::MatrixXcd &u) {
    return kron(u, u.conjugate());
}

Eigen::MatrixXcd superop_of_pauli_channel(const PauliChannel &c) {
    std::size_t dim = std::size_t{1} << c.num_qubits();
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(dim * dim, dim * dim);
    for (const auto &[p, r] : c.rates()) {
        if (r != 0.0) {
            Eigen::MatrixXcd m = pauli_matrix(p);
            s += r * kron(m, m.conjugate());
        }
    }
    return s;
}

Eigen::MatrixXcd superop_of_ptm(const PTM &ptm) {
    const std::size_t n = ptm.num_qubits;
    const std::size_t d = std::size_t{1} << n;
    auto paulis = all_paulis(n);
    std::vector<Eigen::MatrixXcd> mats;
    for (const auto &p : paulis) {
        mats.push_back(pauli_matrix(p));
    }
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (std::size_t i = 0; i < paulis.size(); ++i) {
        for (std::size_t j = 0; j < paulis.size(); ++j) {
            double r = ptm.matrix(i, j);
            if (r == 0.0) {
                continue;
            }
            for (std::size_t c = 0; c < d; ++c) {
                for (std::size_t dd = 0; dd < d; ++dd) {
                    cplx pi = mats[i](c, dd);
                    if (pi == cplx(0)) {
                        continue;
                    }
                    for (std::size_t a = 0; a < d; ++a) {
                        for (std::size_t b = 0; b < d; ++b) {
                            s(c * d + dd, a * d + b) += r * pi * mats[j](b, a) / static_cast<double>(d);
                        }
                    }
                }
            }
        }
    }
    return s;
}

struct GateOp {
    std::vector<int> local;                // cluster-local qubit positions, gate order
    Eigen::MatrixXcd unitary;              // ideal gate followed by over-rotation
    std::optional<PauliChannel> pauli;     // stochastic part, if any
    std::optional<PTM> ptm;                // PTM part, density mode only
};

struct Cluster {
    std::vector<int> qubits;          // global, ascending
    std::vector<GateOp> ops;          // circuit order
    std::vector<int> measured_local;  // local qubit of each measured bit in this cluster
    std::vector<int> measured_pos;    // position of that bit in the output string
    bool stochastic = false;
    bool has_ptm = false;
};

int find_root(std::vector<int> &parent, int x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

std::vector<Cluster> build_clusters(const Circuit &c, const NoiseModel *model) {
    if (c.measured.size() > 64) {
        throw ValidationError("simulator: at most 64 measured qubits are supported");
    }
    std::vector<int> parent(c.num_qubits);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<bool> used(c.num_qubits, false);
    for (const auto &cycle : c.body()) {
        for (const auto &g : cycle.gates) {
            for (int q : g.qubits) {
                used[q] = true;
            }
            if (g.qubits.size() == 2) {
                parent[find_root(parent, g.qubits[0])] = find_root(parent, g.qubits[1]);
            }
        }
    }
    for (int q : c.measured) {
        used[q] = true;
    }
    std::map<int, std::size_t> root_to_cluster;
    std::vector<Cluster> clusters;
    std::vector<int> local_of(c.num_qubits, -1);
    std::vector<std::size_t> cluster_of(c.num_qubits, 0);
    for (int q = 0; q < c.num_qubits; ++q) {
        if (!used[q]) {
            continue;
        }
        int r = find_root(parent, q);
        auto [it, fresh] = root_to_cluster.emplace(r, clusters.size());
        if (fresh) {
            clusters.emplace_back();
        }
        Cluster &cl = clusters[it->second];
        local_of[q] = static_cast<int>(cl.qubits.size());
        cluster_of[q] = it->second;
        cl.qubits.push_back(q);
    }
    for (const auto &cycle : c.body()) {
        for (const auto &g : cycle.gates) {
            Cluster &cl = clusters[cluster_of[g.qubits[0]]];
            GateOp op;
            for (int q : g.qubits) {
                op.local.push_back(local_of[q]);
            }
            op.unitary = gate_unitary(g);
            if (model) {
                GateKey key = GateKey::of(g);
                double theta = model->overrotation(key);
                if (theta != 0.0) {
                    Eigen::MatrixXcd rx = rx_matrix(theta);
                    Eigen::MatrixXcd over = rx;
                    for (std::size_t i = 1; i < g.qubits.size(); ++i) {
                        over = kron(over, rx);
                    }
                    op.unitary = over * op.unitary;
                }
                if (const NoiseChannel *ch = model->channel(key)) {
                    if (const auto *ptm = std::get_if<PTM>(ch)) {
                        op.ptm = *ptm;
                        cl.has_ptm = true;
                    } else {
                        op.pauli = to_pauli_channel(*ch, g.qubits.size());
                        if (op.pauli->total_error() > 0.0) {
                            cl.stochastic = true;
                        } else {
                            op.pauli.reset();
                        }
                    }
                }
            }
            cl.ops.push_back(std::move(op));
        }
    }
    for (std::size_t i = 0; i < c.measured.size(); ++i) {
        int q = c.measured[i];
        Cluster &cl = clusters[cluster_of[q]];
        cl.measured_local.push_back(local_of[q]);
        cl.measured_pos.push_back(static_cast<int>(i));
    }
    return clusters;
}

using OutcomeProbs = std::vector<std::pair<std::uint64_t, double>>;

// Marginal over the cluster's measured bits from per-basis-state probabilities.
OutcomeProbs marginal_outcomes(const Cluster &cl, const std::vector<double> &probs) {
    std::map<std::uint64_t, double> acc;
    for (std::size_t idx = 0; idx < probs.size(); ++idx) {
        if (probs[idx] <= 0.0) {
            continue;
        }
        std::uint64_t key = 0;
        for (std::size_t b = 0; b < cl.measured_local.size(); ++b) {
            if ((idx >> cl.measured_local[b]) & 1u) {
                key |= std::uint64_t{1} << b;
            }
        }
        acc[key] += probs[idx];
    }
    // Drop rounding residue so deterministic outcomes come out as exactly 1.
    double total = 0.0;
    for (auto it = acc.begin(); it != acc.end();) {
        if (it->second < 1e-14) {
            it = acc.erase(it);
        } else {
            total += it->second;
            ++it;
        }
    }
    for (auto &[k, p] : acc) {
        p /= total;
    }
    return {acc.begin(), acc.end()};
}

std::vector<cplx> initial_state(std::size_t bits) {
    std::vector<cplx> v(std::size_t{1} << bits, 0.0);
    v[0] = 1.0;
    return v;
}

std::vector<double> statevector_probs(const Cluster &cl,
                                      const std::vector<std::pair<std::size_t, PauliString>> &errors = {}) {
    std::vector<cplx> v = initial_state(cl.qubits.size());
    std::size_t next_error = 0;
    for (std::size_t i = 0; i < cl.ops.size(); ++i) {
        const GateOp &op = cl.ops[i];
        apply_dense(v, op.unitary, op.local);
        while (next_error < errors.size() && errors[next_error].first == i) {
            apply_dense(v, pauli_matrix(errors[next_error].second), op.local);
            ++next_error;
        }
    }
    std::vector<double> probs(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        probs[i] = std::norm(v[i]);
    }
    return probs;
}

std::vector<double> density_probs(const Cluster &cl) {
    const std::size_t k = cl.qubits.size();
    std::vector<cplx> rho = initial_state(2 * k);
    for (const auto &op : cl.ops) {
        std::vector<int> pos(op.local);
        for (int q : op.local) {
            pos.push_back(q + static_cast<int>(k));
        }
        Eigen::MatrixXcd s = superop_of_unitary(op.unitary);
        if (op.pauli) {
            s = superop_of_pauli_channel(*op.pauli) * s;
        }
        if (op.ptm) {
            s = superop_of_ptm(*op.ptm) * s;
        }
        apply_dense(rho, s, pos);
    }
    std::vector<double> probs(std::size_t{1} << k);
    for (std::size_t r = 0; r < probs.size(); ++r) {
        probs[r] = std::max(0.0, rho[r | (r << k)].real());
    }
    return probs;
}

void check_cap(const Cluster &cl, const SimOptions &opts) {
    if (static_cast<int>(cl.qubits.size()) > opts.exact_max_qubits) {
        throw ValidationError("run_exact: a cluster of " + std::to_string(cl.qubits.size()) +
                              " entangled qubits exceeds the exact-mode cap of " +
                              std::to_string(opts.exact_max_qubits) + "; use run_shots");
    }
}

OutcomeProbs exact_cluster(const Cluster &cl, const SimOptions &opts) {
    check_cap(cl, opts);
    if (cl.stochastic || cl.has_ptm) {
        return marginal_outcomes(cl, density_probs(cl));
    }
    return marginal_outcomes(cl, statevector_probs(cl));
}

OutcomeProbs readout_cluster(const Cluster &cl, const OutcomeProbs &in, const std::vector<ReadoutError> &errs) {
    std::map<std::uint64_t, double> acc;
    for (const auto &[key, p] : in) {
        std::map<std::uint64_t, double> cur{{key, p}};
        for (std::size_t b = 0; b < cl.measured_pos.size(); ++b) {
            const ReadoutError &r = errs[cl.measured_pos[b]];
            if (r.p0 == 0.0 && r.p1 == 0.0) {
                continue;
            }
            std::map<std::uint64_t, double> next;
            for (const auto &[k2, p2] : cur) {
                bool one = (k2 >> b) & 1u;
                double flip = one ? r.p1 : r.p0;
                if (flip < 1.0) {
                    next[k2] += p2 * (1.0 - flip);
                }
                if (flip > 0.0) {
                    next[k2 ^ (std::uint64_t{1} << b)] += p2 * flip;
                }
            }
            cur = std::move(next);
        }
        for (const auto &[k2, p2] : cur) {
            acc[k2] += p2;
        }
    }
    return {acc.begin(), acc.end()};
}

std::string bits_to_string(std::uint64_t key, std::size_t n) {
    std::string s(n, '0');
    for (std::size_t i = 0; i < n; ++i) {
        if ((key >> i) & 1u) {
            s[i] = '1';
        }
    }
    return s;
}

std::vector<ReadoutError> readout_errors(const Circuit &c, const NoiseModel *model) {
    std::vector<ReadoutError> errs(c.measured.size());
    if (model) {
        for (std::size_t i = 0; i < c.measured.size(); ++i) {
            errs[i] = model->readout(c.measured[i]);
        }
    }
    return errs;
}

// Samples an outcome key from a cumulative table.
struct OutcomeSampler {
    std::vector<double> cumulative;
    std::vector<std::uint64_t> keys;

    explicit OutcomeSampler(const OutcomeProbs &probs) {
        double acc = 0;
        for (const auto &[k, p] : probs) {
            acc += p;
            cumulative.push_back(acc);
            keys.push_back(k);
        }
    }
    std::uint64_t sample(Rng &rng) const {
        double u = rng.uniform() * cumulative.back();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) {
            --it;
        }
        return keys[static_cast<std::size_t>(it - cumulative.begin())];
    }
};

struct PauliSampler {
    std::vector<double> cumulative;  // non-identity entries only
    std::vector<PauliString> paulis;

    explicit PauliSampler(const PauliChannel &c) {
        double acc = 0;
        for (const auto &[p, r] : c.rates()) {
            if (!p.is_identity() && r > 0.0) {
                acc += r;
                cumulative.push_back(acc);
                paulis.push_back(p);
            }
        }
    }
    // Index into paulis, or -1 for no error.
    int sample(Rng &rng) const {
        if (cumulative.empty()) {
            return -1;
        }
        double u = rng.uniform();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        return it == cumulative.end() ? -1 : static_cast<int>(it - cumulative.begin());
    }
};

struct PatternHash {
    std::size_t operator()(const std::vector<std::uint32_t> &v) const {
        std::uint64_t h = 0x12345;
        for (auto x : v) {
            h = splitmix64(h ^ x);
        }
        return static_cast<std::size_t>(h);
    }
};

}  // namespace

Distribution run_exact(const Circuit &c, const NoiseModel *model, const SimOptions &opts) {
    c.validate();
    auto clusters = build_clusters(c, model);
    auto errs = readout_errors(c, model);
    std::map<std::uint64_t, double> joint{{0, 1.0}};
    for (const auto &cl : clusters) {
        if (cl.measured_pos.empty()) {
            check_cap(cl, opts);
            continue;
        }
        OutcomeProbs local = readout_cluster(cl, exact_cluster(cl, opts), errs);
        std::map<std::uint64_t, double> next;
        for (const auto &[jk, jp] : joint) {
            for (const auto &[lk, lp] : local) {
                std::uint64_t key = jk;
                for (std::size_t b = 0; b < cl.measured_pos.size(); ++b) {
                    if ((lk >> b) & 1u) {
                        key |= std::uint64_t{1} << cl.measured_pos[b];
                    }
                }
                next[key] += jp * lp;
            }
        }
        if (next.size() > (std::size_t{1} << 22)) {
            throw ValidationError("run_exact: outcome distribution too large; use run_shots");
        }
        joint = std::move(next);
    }
    Distribution d;
    for (const auto &[k, p] : joint) {
        d.probs[bits_to_string(k, c.measured.size())] = p;
    }
    return d;
}

Counts run_shots(const Circuit &c, const NoiseModel &model, std::uint64_t shots, std::uint64_t seed,
                 const SimOptions &opts) {
    if (shots == 0) {
        throw ValidationError("run_shots: shots must be at least 1");
    }
    c.validate();
    auto clusters = build_clusters(c, &model);
    auto errs = readout_errors(c, &model);

    struct ClusterState {
        std::vector<std::pair<std::size_t, PauliSampler>> samplers;  // (op index, sampler)
        std::optional<OutcomeSampler> fixed;
        std::unordered_map<std::vector<std::uint32_t>, OutcomeSampler, PatternHash> cache;
    };
    std::vector<ClusterState> states(clusters.size());
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        const Cluster &cl = clusters[i];
        if (cl.measured_pos.empty()) {
            continue;
        }
        if (cl.has_ptm) {
            states[i].fixed.emplace(exact_cluster(cl, opts));
            continue;
        }
        for (std::size_t k = 0; k < cl.ops.size(); ++k) {
            if (cl.ops[k].pauli) {
                states[i].samplers.emplace_back(k, PauliSampler(*cl.ops[k].pauli));
            }
        }
    }

    Rng rng(seed);
    std::unordered_map<std::uint64_t, std::uint64_t> tally;
    std::vector<std::uint32_t> pattern;
    std::vector<std::pair<std::size_t, PauliString>> errors;
    for (std::uint64_t s = 0; s < shots; ++s) {
        std::uint64_t key = 0;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            const Cluster &cl = clusters[i];
            if (cl.measured_pos.empty()) {
                continue;
            }
            ClusterState &st = states[i];
            std::uint64_t local;
            if (st.fixed) {
                local = st.fixed->sample(rng);
            } else {
                pattern.clear();
                for (std::size_t k = 0; k < st.samplers.size(); ++k) {
                    int e = st.samplers[k].second.sample(rng);
                    if (e >= 0) {
                        pattern.push_back(static_cast<std::uint32_t>(k << 8 | static_cast<std::uint32_t>(e)));
                    }
                }
                auto it = st.cache.find(pattern);
                if (it == st.cache.end()) {
                    errors.clear();
                    for (auto code : pattern) {
                        const auto &[op_index, sampler] = st.samplers[code >> 8];
                        errors.emplace_back(op_index, sampler.paulis[code & 0xFF]);
                    }
                    check_cap(cl, {std::max(opts.exact_max_qubits, 24)});
                    it = st.cache.emplace(pattern, OutcomeSampler(marginal_outcomes(cl, statevector_probs(cl, errors))))
                             .first;
                }
                local = it->second.sample(rng);
            }
            for (std::size_t b = 0; b < cl.measured_pos.size(); ++b) {
                bool one = (local >> b) & 1u;
                const ReadoutError &r = errs[cl.measured_pos[b]];
                double flip = one ? r.p1 : r.p0;
                if (flip > 0.0 && rng.uniform() < flip) {
                    one = !one;
                }
                if (one) {
                    key |= std::uint64_t{1} << cl.measured_pos[b];
                }
            }
        }
        ++tally[key];
    }
    Counts out;
    out.shots = shots;
    out.seed = seed;
    for (const auto &[k, n] : tally) {
        out.counts[bits_to_string(k, c.measured.size())] = n;
    }
    return out;
}

Distribution apply_readout(const Distribution &d, std::span<const ReadoutError> errors) {
    Distribution cur = d;
    for (std::size_t b = 0; b < errors.size(); ++b) {
        const ReadoutError &r = errors[b];
        if (r.p0 == 0.0 && r.p1 == 0.0) {
            continue;
        }
        Distribution next;
        for (const auto &[k, p] : cur.probs) {
            if (b >= k.size()) {
                throw ValidationError("apply_readout: more error entries than bits");
            }
            std::string flipped = k;
            flipped[b] = k[b] == '0' ? '1' : '0';
            double f = k[b] == '1' ? r.p1 : r.p0;
            if (f < 1.0) {
                next.probs[k] += p * (1.0 - f);
            }
            if (f > 0.0) {
                next.probs[flipped] += p * f;
            }
        }
        cur = std::move(next);
    }
    return cur;
}

Distribution apply_readout(const Distribution &d, const ReadoutError &r) {
    std::size_t n = d.probs.empty() ? 0 : d.probs.begin()->first.size();
    std::vector<ReadoutError> errs(n, r);
    return apply_readout(d, errs);
}

Counts sample_counts(const Distribution &d, std::uint64_t shots, std::uint64_t seed) {
    std::vector<std::pair<std::string, double>> entries(d.probs.begin(), d.probs.end());
    Rng rng(seed);
    Counts out;
    out.shots = shots;
    out.seed = seed;
    std::uint64_t remaining = shots;
    double mass = 1.0;
    for (std::size_t i = 0; i < entries.size() && remaining > 0; ++i) {
        std::uint64_t n;
        if (i + 1 == entries.size() || mass <= entries[i].second) {
            n = remaining;
        } else {
            double p = std::clamp(entries[i].second / mass, 0.0, 1.0);
            n = std::binomial_distribution<std::uint64_t>(remaining, p)(rng.engine());
        }
        if (n > 0) {
            out.counts[entries[i].first] = n;
        }
        remaining -= n;
        mass -= entries[i].second;
    }
    return out;
}

Distribution marginal(const Distribution &d, std::span<const int> positions) {
    Distribution out;
    for (const auto &[k, p] : d.probs) {
        std::string sub;
        for (int pos : positions) {
            sub += k.at(pos);
        }
        out.probs[sub] += p;
    }
    return out;
}

Counts marginal(const Counts &c, std::span<const int> positions) {
    Counts out;
    out.shots = c.shots;
    out.seed = c.seed;
    for (const auto &[k, n] : c.counts) {
        std::string sub;
        for (int pos : positions) {
            sub += k.at(pos);
        }
        out.counts[sub] += n;
    }
    return out;
}

json counts_to_json(const Counts &c) {
    return {{"counts", c.counts}, {"shots", c.shots}, {"seed", c.seed}};
}

Counts counts_from_json(const json &j) {
    Counts c;
    c.counts = j.at("counts").get<std::map<std::string, std::uint64_t>>();
    c.shots = j.at("shots").get<std::uint64_t>();
    c.seed = j.value("seed", std::uint64_t{0});
    std::uint64_t total = 0;
    for (const auto &[k, n] : c.counts) {
        total += n;
    }
    if (total != c.shots) {
        throw ValidationError("counts: entries sum to " + std::to_string(total) + " but shots is " +
                              std::to_string(c.shots));
    }
    return c;
}

json distribution_to_json(const Distribution &d) {
    return d.probs;
}

Distribution distribution_from_json(const json &j) {
    Distribution d;
    d.probs = j.get<std::map<std::string, double>>();
    return d;
}

}  // namespace noisebench
