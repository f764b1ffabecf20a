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

#include "noisebench/edc.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "noisebench/error.hpp"
#include "noisebench/metrics.hpp"
#include "noisebench/rng.hpp"

namespace noisebench {

using json = nlohmann::json;

SuiteMode parse_suite_mode(const std::string &text) {
    SuiteMode m;
    auto dash = text.find('-');
    std::string r = text.substr(0, dash);
    std::string l = dash == std::string::npos ? "full" : text.substr(dash + 1);
    std::transform(r.begin(), r.end(), r.begin(), ::tolower);
    std::transform(l.begin(), l.end(), l.begin(), ::tolower);
    if (r == "2c") {
        m.readout = ReadoutMode::TwoCircuit;
    } else if (r == "3c") {
        m.readout = ReadoutMode::ThreeCircuit;
    } else {
        throw ValidationError("unknown readout mode '" + r + "' (use 2c or 3c)");
    }
    if (l == "full") {
        m.layer = LayerMode::Full;
    } else if (l == "perqubit" || l == "per-qubit") {
        m.layer = LayerMode::PerQubit;
    } else {
        throw ValidationError("unknown layer mode '" + l + "' (use full or perqubit)");
    }
    return m;
}

std::string suite_mode_name(const SuiteMode &m) {
    return std::string(m.readout == ReadoutMode::TwoCircuit ? "2c" : "3c") +
           (m.layer == LayerMode::Full ? "-full" : "-perqubit");
}

namespace {

Cycle x_cycle(const std::vector<int> &qubits) {
    Cycle c;
    for (int q : qubits) {
        c.gates.push_back(Gate::make(GateKind::X, {q}));
    }
    return c;
}

int register_size(const Topology &t) {
    int n = 0;
    for (int q : t.nodes) {
        n = std::max(n, q + 1);
    }
    return n;
}

// Probability that measured qubit `q` reads 1, or nullopt if it is not measured.
std::optional<double> prob_one(const Characterization &ch, int q) {
    const auto &measured = ch.test.circuit.measured;
    auto it = std::find(measured.begin(), measured.end(), q);
    if (it == measured.end() || ch.counts.shots == 0) {
        return std::nullopt;
    }
    auto pos = static_cast<std::size_t>(it - measured.begin());
    std::uint64_t ones = 0;
    for (const auto &[k, n] : ch.counts.counts) {
        if (k[pos] == '1') {
            ones += n;
        }
    }
    return static_cast<double>(ones) / static_cast<double>(ch.counts.shots);
}

struct ThreeCircuitSolution {
    double p0, p1, q, residual;
};

// Solves P(1|blank)=p0, P(0|X)=(1-q)p1+q(1-p0), P(1|XX)=((1-q)^2+q^2)p0+2q(1-q)(1-p1) for q in [0, 1/2].
ThreeCircuitSolution solve_three_circuit(double y1, double y2, double y3) {
    const double p0 = y1;
    auto p1_of = [&](double q) { return (y2 - q * (1 - p0)) / (1 - q); };
    auto g = [&](double q) {
        return ((1 - q) * (1 - q) + q * q) * p0 + 2 * q * (1 - q) * (1 - p1_of(q)) - y3;
    };
    auto valid = [&](double q) { return p1_of(q) >= 0.0 && p1_of(q) <= 1.0; };
    auto finish = [&](double q) {
        double p1 = std::clamp(p1_of(q), 0.0, 1.0);
        double r2 = std::abs((1 - q) * p1 + q * (1 - p0) - y2);
        double r3 = std::abs(((1 - q) * (1 - q) + q * q) * p0 + 2 * q * (1 - q) * (1 - p1) - y3);
        return ThreeCircuitSolution{p0, p1, q, std::max(r2, r3)};
    };
    const int grid = 2000;
    auto at = [&](int i) { return 0.5 * i / grid; };
    if (g(0.0) == 0.0 && valid(0.0)) {
        return finish(0.0);
    }
    for (int i = 1; i <= grid; ++i) {
        double lo = at(i - 1), hi = at(i);
        double glo = g(lo), ghi = g(hi);
        if (!valid(lo) || !valid(hi) || ((glo < 0) == (ghi < 0) && ghi != 0.0)) {
            continue;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            double mid = 0.5 * (lo + hi);
            double gm = g(mid);
            if ((gm < 0) == (glo < 0)) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
        }
        return finish(0.5 * (lo + hi));
    }
    ThreeCircuitSolution best = finish(0.0);
    for (int i = 1; i <= grid; ++i) {
        ThreeCircuitSolution s = finish(at(i));
        if (s.residual < best.residual) {
            best = s;
        }
    }
    return best;
}

constexpr double kThreeCircuitTolerance = 0.02;

}  // namespace

TestSuite gen_suite(const Topology &topology, const SuiteMode &mode) {
    topology.validate();
    TestSuite suite{mode, {}};
    const int n = register_size(topology);
    std::vector<int> nodes = topology.nodes;
    std::sort(nodes.begin(), nodes.end());
    suite.tests.push_back({TestKind::Blank, -1, {-1, -1}, Circuit::make(n, {}, nodes)});
    std::vector<TestKind> layers{TestKind::XLayer};
    if (mode.readout == ReadoutMode::ThreeCircuit) {
        layers.push_back(TestKind::XXLayer);
    }
    for (TestKind kind : layers) {
        int depth = kind == TestKind::XLayer ? 1 : 2;
        if (mode.layer == LayerMode::Full) {
            std::vector<Cycle> body(depth, x_cycle(nodes));
            suite.tests.push_back({kind, -1, {-1, -1}, Circuit::make(n, body, nodes)});
        } else {
            for (int q : nodes) {
                std::vector<Cycle> body(depth, x_cycle({q}));
                suite.tests.push_back({kind, q, {-1, -1}, Circuit::make(n, body, {q})});
            }
        }
    }
    for (const auto &[a, b] : topology.couplings()) {
        suite.tests.push_back({TestKind::Bell, -1, {a, b}, build_bell(a, b, n)});
        if (mode.bells == BellCoverage::Both && topology.has_edge(b, a)) {
            suite.tests.push_back({TestKind::Bell, -1, {b, a}, build_bell(b, a, n)});
        }
    }
    return suite;
}

Topology subtopology_for(const Circuit &c, const Topology &device) {
    Topology t;
    std::set<int> qs;
    for (int q : c.active_qubits()) {
        qs.insert(q);
    }
    qs.insert(c.measured.begin(), c.measured.end());
    t.nodes.assign(qs.begin(), qs.end());
    std::vector<std::pair<int, int>> reversed;
    for (const auto &cycle : c.body()) {
        for (const auto &g : cycle.gates) {
            if (g.kind != GateKind::CNOT) {
                continue;
            }
            std::pair<int, int> e{g.qubits[0], g.qubits[1]};
            if (std::find(t.edges.begin(), t.edges.end(), e) == t.edges.end()) {
                t.edges.push_back(e);
                if (device.has_edge(e.second, e.first)) {
                    reversed.emplace_back(e.second, e.first);
                }
            }
        }
    }
    for (const auto &e : reversed) {
        if (std::find(t.edges.begin(), t.edges.end(), e) == t.edges.end()) {
            t.edges.push_back(e);
        }
    }
    return t;
}

ReadoutFit fit_readout(const std::vector<Characterization> &chars, ReadoutMode mode) {
    const Characterization *blank = nullptr;
    for (const auto &ch : chars) {
        if (ch.test.kind == TestKind::Blank) {
            blank = &ch;
        }
    }
    if (!blank) {
        throw ValidationError("fit_readout: suite has no blank circuit");
    }
    auto layer_prob = [&](TestKind kind, int q) -> std::optional<std::pair<double, double>> {
        for (const auto &ch : chars) {
            if (ch.test.kind == kind && (ch.test.qubit == q || ch.test.qubit == -1)) {
                if (auto p = prob_one(ch, q)) {
                    return std::pair{*p, static_cast<double>(ch.counts.shots)};
                }
            }
        }
        return std::nullopt;
    };
    ReadoutFit fit;
    for (int q : blank->test.circuit.measured) {
        double y1 = *prob_one(*blank, q);
        auto x = layer_prob(TestKind::XLayer, q);
        if (!x) {
            throw ValidationError("fit_readout: no X-layer result for qubit " + std::to_string(q));
        }
        double y2 = 1.0 - x->first;
        double n = static_cast<double>(blank->counts.shots);
        ReadoutError r{y1, y2};
        fit.sigma[q] = std::sqrt(std::max(y1 * (1 - y1) / n, y2 * (1 - y2) / x->second));
        fit.residual[q] = 0.0;
        if (mode == ReadoutMode::ThreeCircuit) {
            auto xx = layer_prob(TestKind::XXLayer, q);
            if (!xx) {
                throw ValidationError("fit_readout: no XX-layer result for qubit " + std::to_string(q));
            }
            auto sol = solve_three_circuit(y1, y2, xx->first);
            fit.residual[q] = sol.residual;
            if (sol.residual > kThreeCircuitTolerance) {
                fit.fell_back.push_back(q);
                fit.x_depolarizing[q] = DepolarizingParams{0.0, {q}};
            } else {
                r = {sol.p0, sol.p1};
                fit.x_depolarizing[q] = DepolarizingParams{std::clamp(1.5 * sol.q, 0.0, 1.0), {q}};
            }
        }
        fit.readout[q] = {std::clamp(r.p0, 0.0, 1.0), std::clamp(r.p1, 0.0, 1.0)};
    }
    return fit;
}

std::map<std::string, double> bell_model(double p, const ReadoutError &control, const ReadoutError &target) {
    const double q = 2.0 * p / 3.0;
    const double same = ((1 - q) * (1 - q) + q * q) / 2;
    const double diff = q * (1 - q);
    const std::map<std::string, double> ideal{{"00", same}, {"01", diff}, {"10", diff}, {"11", same}};
    auto read = [](const ReadoutError &r, char truth, char seen) {
        double flip = truth == '1' ? r.p1 : r.p0;
        return truth == seen ? 1 - flip : flip;
    };
    std::map<std::string, double> out;
    for (const auto &[seen, unused] : ideal) {
        double s = 0;
        for (const auto &[truth, p_truth] : ideal) {
            s += p_truth * read(control, truth[0], seen[0]) * read(target, truth[1], seen[1]);
        }
        out[seen] = s;
    }
    return out;
}

std::map<std::pair<int, int>, CnotFit> fit_cnot_depolarizing(const std::vector<Characterization> &chars,
                                                             const std::map<int, ReadoutError> &readout) {
    std::map<std::pair<int, int>, Counts> pooled;
    for (const auto &ch : chars) {
        if (ch.test.kind != TestKind::Bell) {
            continue;
        }
        Counts &c = pooled[ch.test.coupling];
        for (const auto &[k, n] : ch.counts.counts) {
            c.counts[k] += n;
        }
        c.shots += ch.counts.shots;
    }
    auto lookup = [&](int q) {
        auto it = readout.find(q);
        return it == readout.end() ? ReadoutError{} : it->second;
    };
    std::map<std::pair<int, int>, CnotFit> fits;
    for (const auto &[coupling, counts] : pooled) {
        if (counts.shots == 0) {
            continue;
        }
        ReadoutError rc = lookup(coupling.first), rt = lookup(coupling.second);
        Distribution y = counts.normalized();
        auto loss = [&](double p) {
            double s = 0;
            for (const auto &[k, m] : bell_model(p, rc, rt)) {
                double d = y.at(k) - m;
                s += d * d;
            }
            return s;
        };
        const int grid = 400;
        int best_i = 0;
        double best = loss(0.0);
        for (int i = 1; i <= grid; ++i) {
            double v = loss(static_cast<double>(i) / grid);
            if (v < best) {
                best = v;
                best_i = i;
            }
        }
        double a = std::max(0.0, (best_i - 1.0) / grid), b = std::min(1.0, (best_i + 1.0) / grid);
        const double phi = (std::sqrt(5.0) - 1) / 2;
        double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        double f1 = loss(x1), f2 = loss(x2);
        while (b - a > 1e-14) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = loss(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = loss(x2);
            }
        }
        CnotFit fit;
        fit.p = 0.5 * (a + b);
        if (loss(0.0) <= loss(fit.p)) {
            fit.p = 0.0;
        }
        fit.residual = loss(fit.p);
        fit.degenerate = counts.counts.size() <= 1;
        // Sandwich variance with binomial noise on each outcome frequency.
        const double h = 1e-6;
        double lo_p = std::max(0.0, fit.p - h), hi_p = std::min(1.0, fit.p + h);
        auto m_lo = bell_model(lo_p, rc, rt), m_hi = bell_model(hi_p, rc, rt), m0 = bell_model(fit.p, rc, rt);
        double jtj = 0, jvj = 0;
        for (const auto &[k, m] : m0) {
            double j = (m_hi[k] - m_lo[k]) / (hi_p - lo_p);
            jtj += j * j;
            jvj += j * j * m * (1 - m) / static_cast<double>(counts.shots);
        }
        fit.sigma = jtj > 0 ? std::sqrt(jvj) / jtj : 0.0;
        fits[coupling] = fit;
    }
    return fits;
}

NoiseModel compose_model(const EDCModel &m, const Circuit *target) {
    NoiseModel model;
    for (const auto &[q, r] : m.readout) {
        model.set_readout(q, r);
    }
    for (const auto &[e, fit] : m.cnot) {
        model.set_channel({GateKind::CNOT, {e.first, e.second}}, DepolarizingParams{fit.p, {}});
    }
    for (const auto &[e, fit] : m.cnot) {
        if (!m.cnot.count({e.second, e.first})) {
            model.set_channel({GateKind::CNOT, {e.second, e.first}}, DepolarizingParams{fit.p, {}});
        }
    }
    if (m.single_qubit_depolarizing) {
        for (const auto &[q, d] : m.x_depolarizing) {
            for (GateKind k : {GateKind::X, GateKind::H, GateKind::RX90, GateKind::RY90, GateKind::RZ90}) {
                model.set_channel({k, {q}}, DepolarizingParams{d.p, {}});
            }
        }
    }
    if (target) {
        auto missing = model.uncovered(*target, GateKind::CNOT);
        if (!missing.empty()) {
            std::string msg = "compose_model: no fitted coupling for";
            for (const auto &k : missing) {
                msg += " " + key_str(k);
            }
            throw ValidationError(msg);
        }
    }
    return model;
}

std::vector<Characterization> run_suite(const TestSuite &suite, VirtualQpu &qpu, std::uint64_t shots,
                                        std::uint64_t seed, std::vector<std::string> *job_ids) {
    std::vector<Circuit> circuits;
    for (const auto &t : suite.tests) {
        circuits.push_back(t.circuit);
    }
    std::vector<Characterization> out;
    for (auto &job : qpu.submit(circuits, shots, seed)) {
        if (job_ids) {
            job_ids->push_back(job.id);
        }
        for (std::size_t i = 0; i < job.results.size(); ++i) {
            out.push_back({suite.tests[job.first_index + i], std::move(job.results[i])});
        }
    }
    return out;
}

namespace {

struct RefineState {
    SuiteMode mode{ReadoutMode::TwoCircuit, LayerMode::Full, BellCoverage::Forward};
    bool single_qubit = false;
};

Distribution predict(const Circuit &target, const NoiseModel &noise, std::uint64_t seed) {
    try {
        return run_exact(target, &noise);
    } catch (const ValidationError &) {
        return run_shots(target, noise, 1000000, seed).normalized();
    }
}

}  // namespace

RefineResult refine_loop(const Circuit &target, VirtualQpu &qpu, const RefineOptions &opts) {
    if (!(opts.threshold > 0 && opts.threshold <= 1)) {
        throw ValidationError("refine_loop: threshold must be in (0, 1]");
    }
    Counts observed = qpu.run({target}, opts.shots, derive_seed(opts.seed, 0)).front();
    Topology topo = subtopology_for(target, qpu.profile().topology);
    std::map<std::string, Counts> cache;
    std::vector<std::string> job_ids;
    std::uint64_t batch = 0;

    auto evaluate = [&](const RefineState &state) {
        TestSuite suite = gen_suite(topo, state.mode);
        TestSuite pending{suite.mode, {}};
        for (const auto &t : suite.tests) {
            if (!cache.count(serialize(t.circuit))) {
                pending.tests.push_back(t);
            }
        }
        if (!pending.tests.empty()) {
            for (auto &ch : run_suite(pending, qpu, opts.shots, derive_seed(opts.seed, ++batch), &job_ids)) {
                cache[serialize(ch.test.circuit)] = std::move(ch.counts);
            }
        }
        std::vector<Characterization> chars;
        for (const auto &t : suite.tests) {
            chars.push_back({t, cache.at(serialize(t.circuit))});
        }
        EDCModel m;
        ReadoutFit rf = fit_readout(chars, state.mode.readout);
        m.readout = rf.readout;
        m.x_depolarizing = rf.x_depolarizing;
        m.readout_residual = rf.residual;
        m.cnot = fit_cnot_depolarizing(chars, m.readout);
        m.single_qubit_depolarizing = state.single_qubit;
        NoiseModel noise = compose_model(m, &target);
        double d = tvd(observed, predict(target, noise, derive_seed(opts.seed, 1000 + batch)));
        return std::tuple{m, noise, d};
    };

    RefineResult result;
    RefineState state;
    auto [m0, n0, d0] = evaluate(state);
    result.model = m0;
    result.noise = n0;
    result.history.push_back(d0);
    result.candidates.push_back(d0);
    double best = d0;
    const std::vector<std::string> ledger{"3c-readout", "per-qubit-layers", "reversed-bell-tests",
                                          "single-qubit-depolarizing"};
    int round = 1;
    for (const auto &step : ledger) {
        if (best <= opts.threshold || round >= opts.max_rounds) {
            break;
        }
        RefineState next = state;
        if (step == "3c-readout") {
            next.mode.readout = ReadoutMode::ThreeCircuit;
        } else if (step == "per-qubit-layers") {
            next.mode.layer = LayerMode::PerQubit;
        } else if (step == "reversed-bell-tests") {
            next.mode.bells = BellCoverage::Both;
        } else {
            next.single_qubit = true;
            if (next.mode.readout != ReadoutMode::ThreeCircuit) {
                next.mode.readout = ReadoutMode::ThreeCircuit;
            }
        }
        auto [m, noise, d] = evaluate(next);
        result.candidates.push_back(d);
        ++round;
        if (d <= best) {
            state = next;
            best = d;
            result.model = m;
            result.noise = noise;
            result.refinements.push_back(step);
        } else {
            result.refinements.push_back(step + " (rejected)");
        }
        result.history.push_back(best);
    }
    result.reached_threshold = best <= opts.threshold;
    result.model.job_ids = job_ids;
    return result;
}

json edc_model_to_json(const EDCModel &m) {
    json readout = json::object();
    for (const auto &[q, r] : m.readout) {
        json entry = {{"p0", r.p0}, {"p1", r.p1}};
        if (m.readout_residual.count(q)) {
            entry["residual"] = m.readout_residual.at(q);
        }
        readout[std::to_string(q)] = entry;
    }
    json x = json::object();
    for (const auto &[q, d] : m.x_depolarizing) {
        x[std::to_string(q)] = d.p;
    }
    json cnot = json::array();
    for (const auto &[e, f] : m.cnot) {
        cnot.push_back({{"qubits", {e.first, e.second}},
                        {"p", f.p},
                        {"residual", f.residual},
                        {"sigma", f.sigma},
                        {"degenerate", f.degenerate}});
    }
    return {{"readout", readout},
            {"x_depolarizing", x},
            {"cnot", cnot},
            {"single_qubit_depolarizing", m.single_qubit_depolarizing},
            {"job_ids", m.job_ids}};
}

EDCModel edc_model_from_json(const json &j) {
    EDCModel m;
    for (const auto &[q, r] : j.at("readout").items()) {
        m.readout[std::stoi(q)] = {r.at("p0").get<double>(), r.at("p1").get<double>()};
        if (r.contains("residual")) {
            m.readout_residual[std::stoi(q)] = r.at("residual").get<double>();
        }
    }
    const json x = j.value("x_depolarizing", json::object());
    for (const auto &[q, p] : x.items()) {
        m.x_depolarizing[std::stoi(q)] = DepolarizingParams{p.get<double>(), {std::stoi(q)}};
    }
    for (const auto &c : j.at("cnot")) {
        CnotFit f;
        f.p = c.at("p").get<double>();
        f.residual = c.value("residual", 0.0);
        f.sigma = c.value("sigma", 0.0);
        f.degenerate = c.value("degenerate", false);
        m.cnot[{c.at("qubits").at(0).get<int>(), c.at("qubits").at(1).get<int>()}] = f;
    }
    m.single_qubit_depolarizing = j.value("single_qubit_depolarizing", false);
    m.job_ids = j.value("job_ids", std::vector<std::string>{});
    return m;
}

}  // namespace noisebench
