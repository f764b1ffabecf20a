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

import math

import pytest

import noisebench as nb


def line_profile(n, readout=(0.02, 0.03), p=0.03):
    edges = [[i, i + 1] for i in range(n - 1)] + [[i + 1, i] for i in range(n - 1)]
    return {
        "name": f"line{n}",
        "topology": {"nodes": list(range(n)), "edges": edges},
        "noise": {
            "gates": [
                {"kind": "CNOT", "qubits": e, "channel": {"type": "depolarizing", "p": p}} for e in edges
            ],
            "readout": {str(q): {"p0": readout[0], "p1": readout[1]} for q in range(n)},
        },
    }


def test_metrics_examples():
    assert nb.tvd({"0": 0.7, "1": 0.3}, {"0": 0.5, "1": 0.5}) == pytest.approx(0.2, abs=1e-15)
    half = {"counts": {"0": 50, "1": 50}, "shots": 100, "seed": 0}
    assert nb.tvd_error(half, half) == pytest.approx(0.05)
    assert nb.bv_accuracy({"counts": {"101": 75, "001": 25}, "shots": 100, "seed": 0}, "101") == 0.75
    a, b, r2 = nb.fit_exp_decay([1, 2, 3], [math.exp(-0.5 * x) for x in (1, 2, 3)])
    assert a == pytest.approx(1.0) and b == pytest.approx(-0.5) and r2 == pytest.approx(1.0)


def test_pauli_round_trip():
    rates = {"I": 0.9, "X": 0.05, "Z": 0.05}
    fids = nb.channel_to_fidelities(rates)
    assert fids["X"] == pytest.approx(0.9)
    back = nb.fidelities_to_channel(fids)
    for k, v in rates.items():
        assert back[k] == pytest.approx(v, abs=1e-12)
    assert nb.twirl_average_overrotation(0.15, 1)["X"] == pytest.approx(math.sin(0.075) ** 2)


def test_simulate_and_rc():
    bell = nb.build_bell(0, 1)
    assert nb.run_exact(bell) == pytest.approx({"00": 0.5, "11": 0.5})
    for twirled in nb.rc_set(bell, 8, 3):
        assert nb.run_exact(twirled) == pytest.approx({"00": 0.5, "11": 0.5})
    counts = nb.run_shots(bell, None, 1000, 1)
    assert counts["shots"] == 1000


def test_virtual_qpu_and_edc():
    qpu = nb.VirtualQpu(line_profile(3))
    bell = nb.build_bell(0, 1, 3)
    (counts,) = qpu.run([bell], 4096, 7)
    assert counts == qpu.run([bell], 4096, 7)[0]
    model = nb.edc_characterize(qpu, "2c-full", shots=8192, seed=2)
    for entry in model["readout"].values():
        assert entry["p0"] == pytest.approx(0.02, abs=0.01)
        assert entry["p1"] == pytest.approx(0.03, abs=0.01)
    for fit in model["cnot"]:
        assert fit["p"] == pytest.approx(0.03, abs=0.015)
    with pytest.raises(ValueError):
        qpu.run([nb.build_bell(0, 2, 3)], 10, 1)


def test_knr_gst_and_bench():
    qpu = nb.VirtualQpu(line_profile(2, readout=(0.0, 0.0), p=0.02))
    cnot = {"n_qubits": 2, "cycles": [[{"kind": "CNOT", "qubits": [0, 1]}]], "measured": [0, 1]}
    design = nb.knr_design(cnot, randomizations=10, shots=256, seed=4)
    (result,) = nb.knr_fit(design, qpu)
    assert result["cycle"] == "CNOT(0,1)"
    assert 0.0 < result["total_error"] < 0.1

    est = nb.gst_fit(qpu, [0], shots=8192, seed=5)
    assert set(est["gates"]) == {"{}", "I:0", "RX90:0", "RY90:0", "RZ90:0"}

    profile = line_profile(4)
    report = nb.bench_compare(profile, {"truth": profile["noise"]}, "bell,ghz:2-4", shots=4096, seed=6)
    models = {row["model"] for row in report["rows"]}
    assert models == {"experiment", "noiseless", "self-simulation", "truth"}
    assert report["coverage_gaps"] == []
