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

#include "noisebench/knr.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "noisebench/error.hpp"
#include "noisebench/metrics.hpp"
#include "noisebench/parallel.hpp"
#include "noisebench/rng.hpp"

namespace noisebench {

using json = nlohmann::json;

namespace {

Gate localize(const Gate &g) {
    Gate local = g;
    for (std::size_t k = 0; k < local.qubits.size(); ++k) {
        local.qubits[k] = static_cast<int>(k);
    }
    return local;
}

std::string gate_label(const Gate &g) {
    std::string s = std::string(kind_name(g.kind)) + "(";
    for (std::size_t k = 0; k < g.qubits.size(); ++k) {
        s += (k ? "," : "") + std::to_string(g.qubits[k]);
    }
    return s + ")";
}

char basis_letter(std::size_t basis, std::size_t local_index) {
    for (std::size_t k = 0; k < local_index; ++k) {
        basis /= 3;
    }
    return "XYZ"[basis % 3];
}

std::size_t max_arity(const CycleSpec &c) {
    std::size_t a = 1;
    for (const auto &g : c.cycle.gates) {
        a = std::max(a, g.qubits.size());
    }
    return a;
}

}  // namespace

std::vector<int> CycleSpec::support() const {
    std::vector<int> qs = cycle.qubits();
    std::sort(qs.begin(), qs.end());
    return qs;
}

void CycleSpec::validate() const {
    if (cycle.gates.empty()) {
        throw ValidationError("cycle " + id + ": no gates");
    }
    std::set<int> seen;
    for (const auto &g : cycle.gates) {
        if (g.kind == GateKind::MEASURE) {
            throw ValidationError("cycle " + id + ": measurement is not a cycle operation");
        }
        if (!is_clifford(g.kind)) {
            throw ValidationError("cycle " + id + ": " + gate_label(g) + " is not Clifford");
        }
        for (int q : g.qubits) {
            if (!seen.insert(q).second) {
                throw ValidationError("cycle " + id + ": qubit " + std::to_string(q) + " used twice");
            }
        }
    }
}

std::vector<CycleSpec> per_gate_cycles(std::span<const Circuit> circuits) {
    std::vector<CycleSpec> out;
    for (const auto &c : circuits) {
        for (const auto &cycle : c.body()) {
            for (const auto &g : cycle.gates) {
                bool known = std::any_of(out.begin(), out.end(),
                                         [&](const CycleSpec &s) { return s.cycle.gates.front() == g; });
                if (!known) {
                    out.push_back({gate_label(g), Cycle{{g}}});
                }
            }
        }
    }
    return out;
}

std::vector<CycleSpec> per_gate_cycles(const Circuit &c) {
    return per_gate_cycles(std::span<const Circuit>(&c, 1));
}

std::size_t knr_basis_count(const CycleSpec &c) {
    std::size_t n = 1;
    for (std::size_t k = 0; k < max_arity(c); ++k) {
        n *= 3;
    }
    return n;
}

std::vector<Circuit> KnrDesign::circuits() const {
    std::vector<Circuit> out;
    out.reserve(entries.size());
    for (const auto &e : entries) {
        out.push_back(e.circuit);
    }
    return out;
}

KnrDesign design_knr(const std::vector<CycleSpec> &cycles, const KnrConfig &config) {
    if (config.lengths.empty()) {
        throw ValidationError("knr: no sequence lengths");
    }
    std::set<int> distinct;
    for (int m : config.lengths) {
        if (m < 1) {
            throw ValidationError("knr: sequence length must be at least 1, got " + std::to_string(m));
        }
        if (!distinct.insert(m).second) {
            throw ValidationError("knr: repeated sequence length " + std::to_string(m));
        }
    }
    if (config.randomizations < 1) {
        throw ValidationError("knr: need at least one randomization");
    }
    KnrDesign d{config, cycles, {}};
    for (std::size_t ci = 0; ci < cycles.size(); ++ci) {
        cycles[ci].validate();
        for (int m : config.lengths) {
            for (int r = 0; r < config.randomizations; ++r) {
                for (std::size_t b = 0; b < knr_basis_count(cycles[ci]); ++b) {
                    KnrEntry e;
                    e.cycle = ci;
                    e.length = m;
                    e.randomization = r;
                    d.entries.push_back(std::move(e));
                    // Basis letters are filled below per gate.
                    d.entries.back().basis = std::to_string(b);
                }
            }
        }
    }
    parallel_for(d.entries.size(), [&](std::size_t idx) {
        KnrEntry &e = d.entries[idx];
        const CycleSpec &cyc = cycles[e.cycle];
        const std::size_t b = std::stoul(e.basis);
        const std::vector<int> support = cyc.support();
        std::map<int, char> letter;
        for (const auto &g : cyc.cycle.gates) {
            for (std::size_t k = 0; k < g.qubits.size(); ++k) {
                letter[g.qubits[k]] = basis_letter(b, k);
            }
        }
        e.basis.clear();
        for (int q : support) {
            e.basis += letter[q];
        }
        Rng rng(derive_seed(config.seed, idx));
        auto pauli_layer = [&] {
            Cycle c;
            for (int q : support) {
                char p = "IXYZ"[rng.below(4)];
                if (p != 'I') {
                    c.gates.push_back(Gate::pauli_gate(q, p));
                }
            }
            return c;
        };
        Cycle rotate;
        for (int q : support) {
            if (letter[q] == 'X') {
                rotate.gates.push_back(Gate::make(GateKind::H, {q}));
            } else if (letter[q] == 'Y') {
                rotate.gates.push_back(Gate::make(GateKind::RX90, {q}));
            }
        }
        std::vector<Cycle> body;
        auto push = [&](Cycle c) {
            if (!c.gates.empty()) {
                body.push_back(std::move(c));
            }
        };
        push(rotate);
        for (int t = 0; t < e.length; ++t) {
            push(pauli_layer());
            body.push_back(cyc.cycle);
        }
        push(pauli_layer());
        push(rotate);
        e.circuit = Circuit::make(support.back() + 1, std::move(body), support);
        Distribution ideal = run_exact(e.circuit);
        for (const auto &[k, p] : ideal.probs) {
            if (p > 1 - 1e-9) {
                e.reference = k;
            }
        }
        if (e.reference.empty()) {
            throw ValidationError("knr: cycle " + cyc.id + " at length " + std::to_string(e.length) +
                                  " does not return to a basis state; choose lengths where the cycle repeats to identity");
        }
    });
    return d;
}

namespace {

// Per-entry outcome probabilities.
using Outcomes = std::vector<std::map<std::string, double>>;

struct Target {
    std::vector<std::size_t> positions;
    std::string letters;
};

// Expectation of the target Pauli in one entry, or nullopt when the basis does not cover it.
std::optional<double> expectation(const KnrEntry &e, const std::map<std::string, double> &probs, const Target &t) {
    for (std::size_t k = 0; k < t.positions.size(); ++k) {
        if (e.basis[t.positions[k]] != t.letters[k]) {
            return std::nullopt;
        }
    }
    double s = 0;
    for (const auto &[outcome, p] : probs) {
        int parity = 0;
        for (std::size_t pos : t.positions) {
            parity ^= outcome[pos] != e.reference[pos];
        }
        s += parity ? -p : p;
    }
    return s;
}

DecayFit fit_decay(const std::vector<int> &lengths, const std::vector<double> &ys) {
    DecayFit fit;
    for (double y : ys) {
        if (!(y > 0)) {
            fit.reliable = false;
            return fit;
        }
    }
    std::vector<double> xs(lengths.begin(), lengths.end());
    ExpFit e = fit_exp_decay(xs, ys);
    fit.a = e.a;
    fit.f = std::exp(e.b);
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = std::log(ys[i]) - std::log(e.a) - e.b * xs[i];
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / static_cast<double>(xs.size()));
    fit.reliable = fit.f <= 1.5 && fit.a > 0 && fit.a <= 1.5;
    return fit;
}

class Estimator {
   public:
    Estimator(const KnrDesign &d, Outcomes outcomes, int bootstrap)
        : d_(d), outcomes_(std::move(outcomes)), bootstrap_(bootstrap) {
        if (outcomes_.size() != d.entries.size()) {
            throw ValidationError("knr: " + std::to_string(outcomes_.size()) + " results for " +
                                  std::to_string(d.entries.size()) + " design circuits");
        }
    }

    DecayFit fit(std::size_t cycle, const Target &t, std::uint64_t seed) const {
        const auto &lengths = d_.config.lengths;
        const auto nr = static_cast<std::size_t>(d_.config.randomizations);
        // per_r[length index][randomization] = mean over covering bases.
        std::vector<std::vector<double>> sum(lengths.size(), std::vector<double>(nr, 0.0));
        std::vector<std::vector<int>> cnt(lengths.size(), std::vector<int>(nr, 0));
        for (std::size_t i = 0; i < d_.entries.size(); ++i) {
            const KnrEntry &e = d_.entries[i];
            if (e.cycle != cycle) {
                continue;
            }
            if (auto v = expectation(e, outcomes_[i], t)) {
                auto li = static_cast<std::size_t>(
                    std::find(lengths.begin(), lengths.end(), e.length) - lengths.begin());
                sum[li][static_cast<std::size_t>(e.randomization)] += *v;
                cnt[li][static_cast<std::size_t>(e.randomization)] += 1;
            }
        }
        std::vector<std::vector<double>> per_r(lengths.size());
        for (std::size_t li = 0; li < lengths.size(); ++li) {
            for (std::size_t r = 0; r < nr; ++r) {
                if (cnt[li][r] > 0) {
                    per_r[li].push_back(sum[li][r] / cnt[li][r]);
                }
            }
            if (per_r[li].empty()) {
                DecayFit f;
                f.reliable = false;
                return f;
            }
        }
        auto means = [&](const std::vector<std::vector<double>> &v) {
            std::vector<double> ys;
            for (const auto &row : v) {
                double s = 0;
                for (double x : row) {
                    s += x;
                }
                ys.push_back(s / static_cast<double>(row.size()));
            }
            return ys;
        };
        DecayFit fit = fit_decay(lengths, means(per_r));
        if (!fit.reliable || bootstrap_ <= 1) {
            return fit;
        }
        Rng rng(seed);
        double s = 0, s2 = 0;
        int used = 0;
        for (int b = 0; b < bootstrap_; ++b) {
            std::vector<std::vector<double>> resampled(per_r.size());
            for (std::size_t li = 0; li < per_r.size(); ++li) {
                for (std::size_t k = 0; k < per_r[li].size(); ++k) {
                    resampled[li].push_back(per_r[li][rng.below(per_r[li].size())]);
                }
            }
            DecayFit bf = fit_decay(lengths, means(resampled));
            if (bf.reliable) {
                s += bf.f;
                s2 += bf.f * bf.f;
                ++used;
            }
        }
        if (used > 1) {
            double mean = s / used;
            fit.sigma = std::sqrt(std::max(0.0, (s2 - used * mean * mean) / (used - 1)));
        }
        return fit;
    }

   private:
    const KnrDesign &d_;
    Outcomes outcomes_;
    int bootstrap_;
};

Target target_for(const PauliString &local, const Gate &g, const std::vector<int> &support) {
    Target t;
    for (std::size_t k = 0; k < g.qubits.size(); ++k) {
        if (local.letter(k) != 'I') {
            t.positions.push_back(
                static_cast<std::size_t>(std::find(support.begin(), support.end(), g.qubits[k]) - support.begin()));
            t.letters += local.letter(k);
        }
    }
    return t;
}

std::vector<CycleFit> estimate(const KnrDesign &d, Outcomes outcomes, int bootstrap) {
    Estimator est(d, std::move(outcomes), bootstrap);
    std::vector<CycleFit> fits(d.cycles.size());
    parallel_for(d.cycles.size(), [&](std::size_t ci) {
        const CycleSpec &cyc = d.cycles[ci];
        const std::vector<int> support = cyc.support();
        CycleFit &cf = fits[ci];
        cf.cycle_id = cyc.id;
        std::uint64_t seed_index = 0;
        for (const auto &g : cyc.cycle.gates) {
            GateFit gf;
            gf.gate = g;
            for (const auto &p : all_paulis(g.qubits.size())) {
                if (p.weight() == 0) {
                    continue;
                }
                gf.raw[p] = est.fit(ci, target_for(p, g, support),
                                    derive_seed(d.config.seed ^ 0x6b6e72ull, ci * 4096 + seed_index++));
            }
            for (const auto &orbit : degeneracy_classes(g)) {
                if (orbit.front().weight() == 0) {
                    continue;
                }
                double logsum = 0;
                int n = 0;
                for (const auto &p : orbit) {
                    const DecayFit &f = gf.raw.at(p);
                    if (f.reliable) {
                        logsum += std::log(f.f);
                        ++n;
                    }
                }
                if (n > 0) {
                    double f = std::min(1.0, std::exp(logsum / n));
                    for (const auto &p : orbit) {
                        gf.fidelities[p] = f;
                    }
                }
            }
            cf.gates.push_back(std::move(gf));
        }
        // Products of weight-one terms on distinct gates test the per-gate factorization.
        for (std::size_t a = 0; a < cf.gates.size(); ++a) {
            for (std::size_t b = a + 1; b < cf.gates.size(); ++b) {
                const Gate &ga = cf.gates[a].gate, &gb = cf.gates[b].gate;
                for (const auto &pa : all_paulis(ga.qubits.size())) {
                    for (const auto &pb : all_paulis(gb.qubits.size())) {
                        if (pa.weight() != 1 || pb.weight() != 1 || !cf.gates[a].fidelities.count(pa) ||
                            !cf.gates[b].fidelities.count(pb)) {
                            continue;
                        }
                        Target ta = target_for(pa, ga, support), tb = target_for(pb, gb, support);
                        Target both{ta.positions, ta.letters + tb.letters};
                        both.positions.insert(both.positions.end(), tb.positions.begin(), tb.positions.end());
                        DecayFit f = est.fit(ci, both, 0);
                        if (!f.reliable) {
                            continue;
                        }
                        double predicted = cf.gates[a].fidelities.at(pa) * cf.gates[b].fidelities.at(pb);
                        cf.cross_gate_residual = std::max(cf.cross_gate_residual, std::abs(f.f - predicted));
                    }
                }
            }
        }
    });
    return fits;
}

}  // namespace

std::vector<CycleFit> estimate_fidelities(const KnrDesign &design, const std::vector<Counts> &counts, int bootstrap) {
    Outcomes o;
    o.reserve(counts.size());
    for (const auto &c : counts) {
        o.push_back(c.normalized().probs);
    }
    return estimate(design, std::move(o), bootstrap);
}

std::vector<CycleFit> estimate_fidelities(const KnrDesign &design, const std::vector<Distribution> &dists) {
    Outcomes o;
    o.reserve(dists.size());
    for (const auto &d : dists) {
        o.push_back(d.probs);
    }
    return estimate(design, std::move(o), 0);
}

namespace {

// Places per-gate channels onto the ascending support order.
PauliChannel assemble(const std::vector<PauliChannel> &channels, const std::vector<Gate> &gates,
                      const std::vector<int> &support) {
    std::map<PauliString, double> rates{{PauliString(support.size()), 1.0}};
    for (std::size_t gi = 0; gi < gates.size(); ++gi) {
        std::vector<int> positions;
        for (int q : gates[gi].qubits) {
            positions.push_back(
                static_cast<int>(std::find(support.begin(), support.end(), q) - support.begin()));
        }
        std::map<PauliString, double> next;
        for (const auto &[p, r] : rates) {
            for (const auto &[local, rl] : channels[gi].rates()) {
                if (rl == 0.0) {
                    continue;
                }
                PauliString q = p;
                for (std::size_t k = 0; k < positions.size(); ++k) {
                    q.set(static_cast<std::size_t>(positions[k]), local.letter(k));
                }
                next[q] += r * rl;
            }
        }
        rates = std::move(next);
    }
    return PauliChannel(support.size(), std::move(rates));
}

constexpr std::size_t kMaxAssembledQubits = 8;
constexpr double kCrossGateTolerance = 0.01;

}  // namespace

KnrResult reconstruct(const CycleFit &fit, const CycleSpec &cycle) {
    KnrResult r;
    r.cycle_id = fit.cycle_id;
    r.support = cycle.support();
    double identity = 1.0;
    for (const auto &gf : fit.gates) {
        std::size_t n = gf.gate.qubits.size();
        std::map<PauliString, double> values{{PauliString(n), 1.0}};
        for (const auto &[p, f] : gf.fidelities) {
            values[p] = std::clamp(f, -1.0, 1.0);
        }
        auto support = all_paulis(n);
        PauliChannel c = fidelities_to_channel(FidelityVector(n, values), support);
        identity *= c.rate(PauliString(n));
        r.gate_channels.push_back(std::move(c));
        r.gates.push_back(gf.gate);
    }
    if (r.support.size() <= kMaxAssembledQubits) {
        r.channel = assemble(r.gate_channels, r.gates, r.support);
    }
    r.total_error = 1.0 - identity;
    r.cross_gate_residual = fit.cross_gate_residual;
    r.residual_flagged = fit.cross_gate_residual > kCrossGateTolerance;
    return r;
}

std::vector<KnrResult> reconstruct(const std::vector<CycleFit> &fits, const KnrDesign &design) {
    std::vector<KnrResult> out;
    for (std::size_t i = 0; i < fits.size(); ++i) {
        out.push_back(reconstruct(fits[i], design.cycles.at(i)));
    }
    return out;
}

std::vector<std::vector<PauliString>> degeneracy_classes(const Gate &gate) {
    const Gate local = localize(gate);
    std::vector<std::vector<PauliString>> classes;
    std::set<PauliString> seen;
    for (const auto &p : all_paulis(gate.qubits.size())) {
        if (seen.count(p)) {
            continue;
        }
        std::vector<PauliString> orbit;
        PauliString cur = p;
        while (!seen.count(cur)) {
            seen.insert(cur);
            orbit.push_back(cur);
            cur = conjugate(cur, local).pauli;
        }
        std::sort(orbit.begin(), orbit.end(), [](const PauliString &a, const PauliString &b) { return a.str() < b.str(); });
        classes.push_back(std::move(orbit));
    }
    return classes;
}

PauliChannel resolve_degeneracies(const PauliChannel &c, const Gate &gate, std::vector<std::string> *annotations) {
    if (c.num_qubits() != gate.qubits.size()) {
        throw ValidationError("resolve_degeneracies: channel size differs from the gate arity");
    }
    std::map<PauliString, double> rates = c.rates();
    for (const auto &orbit : degeneracy_classes(gate)) {
        if (orbit.size() < 2) {
            continue;
        }
        auto keep = std::find_if(orbit.begin(), orbit.end(), [](const PauliString &p) { return p.weight() == 1; });
        if (keep == orbit.end()) {
            keep = orbit.begin();
        }
        double total = 0;
        std::string note;
        for (const auto &p : orbit) {
            auto it = rates.find(p);
            if (it != rates.end()) {
                total += it->second;
                rates.erase(it);
            }
            note += (note.empty() ? "" : "+") + p.str();
        }
        rates[*keep] = total;
        if (annotations) {
            annotations->push_back(note + " -> " + keep->str());
        }
    }
    return PauliChannel(c.num_qubits(), std::move(rates));
}

KnrResult resolve_degeneracies(const KnrResult &r) {
    KnrResult out = r;
    out.annotations.clear();
    for (std::size_t gi = 0; gi < r.gates.size(); ++gi) {
        std::vector<std::string> notes;
        out.gate_channels[gi] = resolve_degeneracies(r.gate_channels[gi], r.gates[gi], &notes);
        for (auto &n : notes) {
            out.annotations.push_back(gate_label(r.gates[gi]) + ": " + n);
        }
    }
    if (r.support.size() <= kMaxAssembledQubits) {
        out.channel = assemble(out.gate_channels, out.gates, out.support);
    }
    return out;
}

double depolarizing_summary(const PauliChannel &c) {
    if (c.num_qubits() != 2) {
        throw ValidationError("depolarizing_summary: needs a two-qubit channel, got " +
                              std::to_string(c.num_qubits()));
    }
    double per_qubit[2] = {0, 0};
    for (const auto &[p, r] : c.rates()) {
        if (p.weight() == 1) {
            per_qubit[p.letter(0) == 'I' ? 1 : 0] += r;
        }
    }
    return (per_qubit[0] + per_qubit[1]) / 2;
}

double depolarizing_summary(const KnrResult &r) {
    return depolarizing_summary(r.channel);
}

std::vector<Counts> run_knr(const KnrDesign &design, VirtualQpu &qpu) {
    return qpu.run(design.circuits(), design.config.shots, design.config.seed);
}

namespace {

json cycle_to_json(const CycleSpec &c) {
    int n = c.support().empty() ? 1 : c.support().back() + 1;
    return {{"id", c.id}, {"gates", circuit_to_json(Circuit::make(n, {c.cycle}, {})).at("cycles").at(0)}};
}

CycleSpec cycle_from_json(const json &j) {
    int n = 0;
    for (const auto &g : j.at("gates")) {
        for (int q : g.at("qubits")) {
            n = std::max(n, q + 1);
        }
    }
    Circuit c = circuit_from_json({{"n_qubits", n}, {"cycles", json::array({j.at("gates")})}});
    return {j.at("id").get<std::string>(), c.cycles.at(0)};
}

}  // namespace

json knr_design_to_json(const KnrDesign &d) {
    json cycles = json::array();
    for (const auto &c : d.cycles) {
        cycles.push_back(cycle_to_json(c));
    }
    json entries = json::array();
    for (const auto &e : d.entries) {
        entries.push_back({{"cycle", e.cycle},
                           {"length", e.length},
                           {"randomization", e.randomization},
                           {"basis", e.basis},
                           {"reference", e.reference},
                           {"circuit", circuit_to_json(e.circuit)}});
    }
    return {{"config",
             {{"lengths", d.config.lengths},
              {"randomizations", d.config.randomizations},
              {"shots", d.config.shots},
              {"seed", d.config.seed}}},
            {"cycles", cycles},
            {"entries", entries}};
}

KnrDesign knr_design_from_json(const json &j) {
    KnrDesign d;
    const json &c = j.at("config");
    d.config.lengths = c.at("lengths").get<std::vector<int>>();
    d.config.randomizations = c.at("randomizations").get<int>();
    d.config.shots = c.at("shots").get<std::uint64_t>();
    d.config.seed = c.at("seed").get<std::uint64_t>();
    for (const auto &jc : j.at("cycles")) {
        d.cycles.push_back(cycle_from_json(jc));
    }
    for (const auto &je : j.at("entries")) {
        KnrEntry e;
        e.cycle = je.at("cycle").get<std::size_t>();
        e.length = je.at("length").get<int>();
        e.randomization = je.at("randomization").get<int>();
        e.basis = je.at("basis").get<std::string>();
        e.reference = je.at("reference").get<std::string>();
        e.circuit = circuit_from_json(je.at("circuit"));
        if (e.cycle >= d.cycles.size()) {
            throw ValidationError("knr manifest: entry refers to unknown cycle " + std::to_string(e.cycle));
        }
        d.entries.push_back(std::move(e));
    }
    return d;
}

json knr_result_to_json(const KnrResult &r) {
    json gates = json::array();
    for (std::size_t gi = 0; gi < r.gates.size(); ++gi) {
        json rates = json::object();
        for (const auto &[p, v] : r.gate_channels[gi].rates()) {
            rates[p.str()] = v;
        }
        gates.push_back({{"gate", gate_label(r.gates[gi])}, {"rates", rates}});
    }
    json rates = json::object();
    for (const auto &[p, v] : r.channel.rates()) {
        rates[p.str()] = v;
    }
    return {{"cycle", r.cycle_id},
            {"support", r.support},
            {"rates", rates},
            {"gates", gates},
            {"annotations", r.annotations},
            {"total_error", r.total_error},
            {"cross_gate_residual", r.cross_gate_residual},
            {"residual_flagged", r.residual_flagged}};
}

}  // namespace noisebench
