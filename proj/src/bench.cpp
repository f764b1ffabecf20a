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

#include "noisebench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "noisebench/error.hpp"
#include "noisebench/parallel.hpp"
#include "noisebench/rng.hpp"

namespace noisebench {

using json = nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

int parse_int(const std::string &s, const std::string &what) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used == s.size()) {
            return v;
        }
    } catch (const std::exception &) {
    }
    throw ValidationError("targets: bad " + what + " '" + s + "'");
}

enum class TargetKind { Bell, Ghz, Bv };

struct Target {
    TargetKind kind;
    std::string id;
    Circuit circuit;
    std::string secret;
};

std::vector<Target> make_targets(const Topology &t, const BenchTargets &targets, const GhzMapping &mapping) {
    int reg = t.nodes.empty() ? 0 : *std::max_element(t.nodes.begin(), t.nodes.end()) + 1;
    std::vector<Target> out;
    if (targets.bell) {
        if (t.edges.empty()) {
            throw ValidationError("bench: bell target needs a coupled pair");
        }
        out.push_back({TargetKind::Bell, "bell", build_bell(t.edges[0].first, t.edges[0].second, reg), ""});
    }
    if (targets.ghz_min > 0) {
        for (int n = targets.ghz_min; n <= targets.ghz_max; ++n) {
            out.push_back({TargetKind::Ghz, "ghz" + std::to_string(n), build_ghz(n, mapping, &t, reg), ""});
        }
    }
    for (const auto &secret : targets.bv_secrets) {
        // Oracle: the node with the most incoming couplings.
        int best = -1;
        std::vector<int> best_in;
        for (int q : t.nodes) {
            std::vector<int> in;
            for (int d : t.nodes) {
                if (d != q && t.has_edge(d, q)) {
                    in.push_back(d);
                }
            }
            if (in.size() > best_in.size()) {
                best = q;
                best_in = in;
            }
        }
        if (best_in.size() < secret.size()) {
            throw ValidationError("bench: no node couples to " + std::to_string(secret.size()) +
                                  " data qubits for bv" + secret);
        }
        best_in.resize(secret.size());
        out.push_back({TargetKind::Bv, "bv" + secret, build_bv(secret, best_in, best, reg), secret});
    }
    return out;
}

double score(const Target &t, const Distribution &d) {
    switch (t.kind) {
        case TargetKind::Ghz: {
            if (d.probs.empty()) {
                return 0.0;
            }
            std::size_t n = d.probs.begin()->first.size();
            return d.at(std::string(n, '0')) + d.at(std::string(n, '1'));
        }
        case TargetKind::Bv:
            return d.at(t.secret);
        case TargetKind::Bell:
            return d.at("00") + d.at("11");
    }
    return 0.0;
}

Distribution predict(const Circuit &c, const NoiseModel &m, std::uint64_t seed) {
    try {
        return run_exact(c, &m);
    } catch (const ValidationError &) {
        return run_shots(c, m, 1000000, seed).normalized();
    }
}

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char ch : s) {
        q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    }
    return q + "\"";
}

}  // namespace

BenchTargets parse_targets(const std::string &text) {
    BenchTargets out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        if (item == "bell") {
            out.bell = true;
        } else if (item.rfind("ghz:", 0) == 0) {
            std::string range = item.substr(4);
            auto dash = range.find('-');
            out.ghz_min = parse_int(range.substr(0, dash), "ghz size");
            out.ghz_max = dash == std::string::npos ? out.ghz_min : parse_int(range.substr(dash + 1), "ghz size");
            if (out.ghz_min < 2 || out.ghz_max < out.ghz_min) {
                throw ValidationError("targets: bad ghz range '" + range + "'");
            }
        } else if (item.rfind("bv:", 0) == 0) {
            std::string s = item.substr(3);
            if (s == "all") {
                for (int v = 0; v < 8; ++v) {
                    std::string b;
                    for (int k = 2; k >= 0; --k) {
                        b += ((v >> k) & 1) ? '1' : '0';
                    }
                    out.bv_secrets.push_back(b);
                }
            } else {
                std::stringstream bits(s);
                std::string secret;
                while (std::getline(bits, secret, '+')) {
                    if (secret.empty() || secret.find_first_not_of("01") != std::string::npos) {
                        throw ValidationError("targets: bad bv secret '" + secret + "'");
                    }
                    out.bv_secrets.push_back(secret);
                }
            }
        } else {
            throw ValidationError("targets: unknown target '" + item + "'");
        }
    }
    if (!out.bell && out.ghz_min == 0 && out.bv_secrets.empty()) {
        throw ValidationError("targets: nothing to run");
    }
    return out;
}

GhzMapping bfs_ghz_mapping(const Topology &t) {
    if (t.nodes.empty()) {
        throw ValidationError("bench: empty topology");
    }
    GhzMapping m;
    m.root = t.nodes.front();
    std::set<int> seen{m.root};
    std::deque<int> queue{m.root};
    while (!queue.empty()) {
        int c = queue.front();
        queue.pop_front();
        for (int q : t.nodes) {
            if (!seen.count(q) && t.has_edge(c, q)) {
                seen.insert(q);
                m.cnots.emplace_back(c, q);
                queue.push_back(q);
            }
        }
    }
    return m;
}

std::vector<std::pair<std::string, Circuit>> bench_circuits(const Topology &t, const BenchTargets &targets,
                                                            const GhzMapping &mapping) {
    std::vector<std::pair<std::string, Circuit>> out;
    for (auto &tg : make_targets(t, targets, mapping)) {
        out.emplace_back(tg.id, std::move(tg.circuit));
    }
    return out;
}

const BenchRow *BenchmarkReport::find(const std::string &circuit, const std::string &model) const {
    for (const auto &r : rows) {
        if (r.circuit == circuit && r.model == model) {
            return &r;
        }
    }
    return nullptr;
}

std::string BenchmarkReport::to_csv() const {
    std::ostringstream os;
    os << std::setprecision(10);
    os << "circuit,model,tvd,tvd_error,shots,runtime_ms,score\n";
    for (const auto &r : rows) {
        os << csv_field(r.circuit) << ',' << csv_field(r.model) << ',' << r.tvd << ',' << r.tvd_error << ','
           << r.shots << ',' << r.runtime_ms << ',' << r.score << '\n';
    }
    return os.str();
}

json BenchmarkReport::to_json() const {
    json j;
    j["provenance"] = {{"profile", profile}, {"seed", seed}, {"shots", shots}, {"job_ids", job_ids}};
    j["rows"] = json::array();
    for (const auto &r : rows) {
        j["rows"].push_back({{"circuit", r.circuit},
                             {"model", r.model},
                             {"tvd", r.tvd},
                             {"tvd_error", r.tvd_error},
                             {"shots", r.shots},
                             {"runtime_ms", r.runtime_ms},
                             {"score", r.score}});
    }
    j["fits"] = json::array();
    for (const auto &f : fits) {
        j["fits"].push_back(
            {{"model", f.model}, {"a", f.fit.a}, {"b", f.fit.b}, {"r2", f.fit.r2}, {"label", f.fit.format()}});
    }
    j["coverage_gaps"] = coverage_gaps;
    return j;
}

BenchmarkReport bench_compare(const DeviceProfile &profile, const std::vector<NamedModel> &models,
                              const BenchTargets &targets, const BenchOptions &opts) {
    profile.validate();
    GhzMapping mapping = opts.ghz_mapping ? *opts.ghz_mapping : bfs_ghz_mapping(profile.topology);
    std::vector<Target> tg = make_targets(profile.topology, targets, mapping);
    std::vector<Circuit> circuits;
    for (const auto &t : tg) {
        circuits.push_back(t.circuit);
    }
    for (const auto &m : models) {
        if (m.name == kNoiselessBaseline || m.name == kSelfSimulation || m.name == kExperiment) {
            throw ValidationError("bench: model name '" + m.name + "' is reserved");
        }
    }

    BenchmarkReport rep;
    rep.profile = profile.name;
    rep.seed = opts.seed;
    rep.shots = opts.shots;

    VirtualQpu qpu(profile, opts.store_dir);
    auto run_device = [&](std::uint64_t seed, std::vector<Counts> &out) {
        auto start = Clock::now();
        out.assign(circuits.size(), Counts{});
        for (const auto &job : qpu.submit(circuits, opts.shots, seed)) {
            rep.job_ids.push_back(job.id);
            for (std::size_t i = 0; i < job.results.size(); ++i) {
                out[job.first_index + i] = job.results[i];
            }
        }
        return circuits.empty() ? 0.0 : elapsed_ms(start) / static_cast<double>(circuits.size());
    };
    std::vector<Counts> experiment, self;
    double exp_ms = run_device(derive_seed(opts.seed, 0), experiment);
    double self_ms = run_device(derive_seed(opts.seed, 1), self);

    auto trimmed = [&](const Target &t, const auto &d) {
        using T = std::decay_t<decltype(d)>;
        if (t.kind != TargetKind::Ghz || opts.trim.empty()) {
            return T(d);
        }
        for (int p : opts.trim) {
            if (p < 0 || p >= static_cast<int>(t.circuit.measured.size())) {
                throw ValidationError("bench: trim position " + std::to_string(p) + " outside " + t.id);
            }
        }
        return marginal(d, std::span<const int>(opts.trim));
    };

    struct ModelResult {
        bool covered = false;
        Counts counts;
        double ms = 0.0;
    };
    std::vector<std::vector<ModelResult>> sims(models.size(), std::vector<ModelResult>(tg.size()));
    std::vector<Distribution> ideal(tg.size());
    parallel_for(tg.size() * (models.size() + 1), [&](std::size_t job) {
        std::size_t ti = job % tg.size();
        std::size_t mi = job / tg.size();
        if (mi == models.size()) {
            ideal[ti] = run_exact(tg[ti].circuit);
            return;
        }
        auto &slot = sims[mi][ti];
        if (!models[mi].model.uncovered(tg[ti].circuit, GateKind::CNOT).empty()) {
            return;
        }
        auto start = Clock::now();
        std::uint64_t seed = derive_seed(derive_seed(opts.seed, 2 + mi), ti);
        slot.counts = sample_counts(predict(tg[ti].circuit, models[mi].model, seed), opts.shots, seed);
        slot.ms = elapsed_ms(start);
        slot.covered = true;
    });

    for (std::size_t mi = 0; mi < models.size(); ++mi) {
        for (std::size_t ti = 0; ti < tg.size(); ++ti) {
            if (sims[mi][ti].covered) {
                continue;
            }
            std::string missing;
            for (const auto &k : models[mi].model.uncovered(tg[ti].circuit, GateKind::CNOT)) {
                missing += (missing.empty() ? "" : " ") + key_str(k);
            }
            rep.coverage_gaps.push_back(models[mi].name + ": " + tg[ti].id + " missing " + missing);
        }
    }

    std::map<std::string, std::vector<std::pair<double, double>>> ghz_series;
    for (std::size_t ti = 0; ti < tg.size(); ++ti) {
        const Target &t = tg[ti];
        Counts h = trimmed(t, experiment[ti]);
        auto add = [&](const std::string &model, double d, double err, double ms, double s) {
            rep.rows.push_back({t.id, model, d, err, opts.shots, ms, s});
            if (t.kind == TargetKind::Ghz) {
                ghz_series[model].emplace_back(static_cast<double>(t.circuit.measured.size()), s);
            }
        };
        add(kExperiment, 0.0, 0.0, exp_ms, score(t, h.normalized()));
        Distribution id = trimmed(t, ideal[ti]);
        add(kNoiselessBaseline, tvd(h, id), tvd_error(h, id), 0.0, score(t, id));
        Counts s = trimmed(t, self[ti]);
        add(kSelfSimulation, tvd(h, s), tvd_error(h, s), self_ms, score(t, s.normalized()));
        for (std::size_t mi = 0; mi < models.size(); ++mi) {
            if (!sims[mi][ti].covered) {
                continue;
            }
            Counts m = trimmed(t, sims[mi][ti].counts);
            add(models[mi].name, tvd(h, m), tvd_error(h, m), sims[mi][ti].ms, score(t, m.normalized()));
        }
    }

    std::vector<std::string> order{kExperiment, kNoiselessBaseline, kSelfSimulation};
    for (const auto &m : models) {
        order.push_back(m.name);
    }
    for (const auto &name : order) {
        auto it = ghz_series.find(name);
        if (it == ghz_series.end() || it->second.size() < 2) {
            continue;
        }
        std::vector<double> xs, ys;
        for (auto [x, y] : it->second) {
            xs.push_back(x);
            ys.push_back(y);
        }
        if (std::any_of(ys.begin(), ys.end(), [](double y) { return y <= 0.0; })) {
            continue;
        }
        rep.fits.push_back({name, fit_exp_decay(xs, ys)});
    }
    return rep;
}

}  // namespace noisebench
