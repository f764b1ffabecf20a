# Copyright 2026 The noisebench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Noise characterization and benchmarking against a virtual QPU."""

from noisebench._core import (
    Error,
    ParseError,
    ValidationError,
    VirtualQpu,
    bench_compare,
    build_bell,
    build_bv,
    build_ghz,
    bv_accuracy,
    channel_to_fidelities,
    depolarizing_channel,
    edc_characterize,
    fidelities_to_channel,
    fit_exp_decay,
    ghz_expected_rate,
    gst_fit,
    gst_simulate,
    knr_design,
    knr_fit,
    rc_set,
    refine_loop,
    run_exact,
    run_shots,
    toronto_like_profile,
    tvd,
    tvd_counts,
    tvd_error,
    twirl_average_overrotation,
)

__version__ = "0.1.0"

__all__ = [
    "Error",
    "ParseError",
    "ValidationError",
    "VirtualQpu",
    "bench_compare",
    "build_bell",
    "build_bv",
    "build_ghz",
    "bv_accuracy",
    "channel_to_fidelities",
    "depolarizing_channel",
    "edc_characterize",
    "fidelities_to_channel",
    "fit_exp_decay",
    "ghz_expected_rate",
    "gst_fit",
    "gst_simulate",
    "knr_design",
    "knr_fit",
    "rc_set",
    "refine_loop",
    "run_exact",
    "run_shots",
    "toronto_like_profile",
    "tvd",
    "tvd_counts",
    "tvd_error",
    "twirl_average_overrotation",
]
