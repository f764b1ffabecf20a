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

#include "noisebench/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "noisebench/error.hpp"

namespace noisebench {

namespace {

void require_same_register(const Distribution &h, const Distribution &m) {
    if (h.probs.empty() || m.probs.empty()) {
        throw ValidationError("tvd: empty distribution");
    }
    if (h.probs.begin()->first.size() != m.probs.begin()->first.size()) {
        throw ValidationError("tvd: distributions over different registers");
    }
}

double state_variance(double p, double n) {
    return p * (1.0 - p) / n;
}

}  // namespace

double tvd(const Distribution &h, const Distribution &m) {
    require_same_register(h, m);
    std::set<std::string> keys;
    for (const auto &[k, p] : h.probs) {
        keys.insert(k);
    }
    for (const auto &[k, p] : m.probs) {
        keys.insert(k);
    }
    double s = 0;
    for (const auto &k : keys) {
        s += std::abs(h.at(k) - m.at(k));
    }
    return 0.5 * s;
}

double tvd(const Counts &h, const Counts &m) {
    return tvd(h.normalized(), m.normalized());
}

double tvd(const Counts &h, const Distribution &m) {
    return tvd(h.normalized(), m);
}

double tvd_error(const Counts &h, const Counts &m) {
    if (h.shots == 0 || m.shots == 0) {
        throw ValidationError("tvd_error: zero shots");
    }
    double var = 0;
    for (const auto &[k, n] : h.counts) {
        var += state_variance(static_cast<double>(n) / h.shots, h.shots);
    }
    for (const auto &[k, n] : m.counts) {
        var += state_variance(static_cast<double>(n) / m.shots, m.shots);
    }
    return 0.5 * std::sqrt(var);
}

double tvd_error(const Counts &h, const Distribution &) {
    if (h.shots == 0) {
        throw ValidationError("tvd_error: zero shots");
    }
    double var = 0;
    for (const auto &[k, n] : h.counts) {
        var += state_variance(static_cast<double>(n) / h.shots, h.shots);
    }
    return 0.5 * std::sqrt(var);
}

double bv_accuracy(const Counts &counts, const std::string &secret) {
    if (counts.shots == 0) {
        throw ValidationError("bv_accuracy: zero shots");
    }
    for (const auto &[k, n] : counts.counts) {
        if (k.size() != secret.size()) {
            throw ValidationError("bv_accuracy: register length differs from the secret");
        }
    }
    return static_cast<double>(counts.at(secret)) / counts.shots;
}

double ghz_expected_rate(const Counts &counts, std::size_t n) {
    if (counts.shots == 0) {
        throw ValidationError("ghz_expected_rate: zero shots");
    }
    return static_cast<double>(counts.at(std::string(n, '0')) + counts.at(std::string(n, '1'))) / counts.shots;
}

std::string ExpFit::format() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.4ge^{%.4gx}, R^2=%.3f", a, b, r2);
    return buf;
}

ExpFit fit_exp_decay(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw ValidationError("fit_exp_decay: need at least two (x, y) pairs");
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    std::vector<double> ly(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (!(ys[i] > 0)) {
            throw ValidationError("fit_exp_decay: y values must be positive");
        }
        ly[i] = std::log(ys[i]);
        sx += xs[i];
        sy += ly[i];
    }
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0) {
        throw ValidationError("fit_exp_decay: x values are all equal");
    }
    ExpFit fit;
    fit.b = sxy / sxx;
    fit.a = std::exp(my - fit.b * mx);
    double ss_res = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ly[i] - (my + fit.b * (xs[i] - mx));
        ss_res += r * r;
    }
    fit.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

}  // namespace noisebench
