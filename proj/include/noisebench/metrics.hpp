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

#pragma once

#include <span>
#include <string>

#include "noisebench/simulator.hpp"

namespace noisebench {

/// Total variation distance, half the L1 distance over the union of outcomes.
double tvd(const Distribution &h, const Distribution &m);
double tvd(const Counts &h, const Counts &m);
double tvd(const Counts &h, const Distribution &m);

/// Propagated one-sigma error of the TVD from binomial per-state errors.
double tvd_error(const Counts &h, const Counts &m);
/// As above with `m` exact (no sampling error).
double tvd_error(const Counts &h, const Distribution &m);

double bv_accuracy(const Counts &counts, const std::string &secret);
double ghz_expected_rate(const Counts &counts, std::size_t n);

struct ExpFit {
    double a = 0.0;
    double b = 0.0;
    double r2 = 0.0;

    /// e.g. "1.112e^{-0.0834x}, R^2=0.989"
    std::string format() const;
};

/// Least squares of log y = log a + b x; R^2 in log space.
ExpFit fit_exp_decay(std::span<const double> xs, std::span<const double> ys);

}  // namespace noisebench
