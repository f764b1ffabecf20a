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

"""Writes the synthetic toronto-like device profile."""

import json
import pathlib

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent.parent
SEED = 20210601
READOUT_OUTLIERS = {4: (0.31, 0.28), 20: (0.27, 0.33)}


def main():
    rng = np.random.default_rng(SEED)
    topology = json.loads((ROOT / "data" / "toronto_topology.json").read_text())
    readout = {}
    for q in topology["nodes"]:
        p0, p1 = READOUT_OUTLIERS.get(q, rng.uniform(0.01, 0.05, size=2))
        readout[str(q)] = {"p0": round(float(p0), 4), "p1": round(float(p1), 4)}
    gates = []
    for c, t in topology["edges"]:
        p = round(float(rng.uniform(0.01, 0.08)), 4)
        gates.append({"kind": "CNOT", "qubits": [c, t],
                      "channel": {"type": "depolarizing", "p": p}})
    for q in topology["nodes"]:
        for kind in ("X", "H"):
            p = round(float(rng.uniform(0.0005, 0.003)), 5)
            gates.append({"kind": kind, "qubits": [q],
                          "channel": {"type": "depolarizing", "p": p}})
    profile = {
        "name": "toronto-like",
        "synthetic": True,
        "seed": SEED,
        "topology": {"nodes": topology["nodes"], "edges": topology["edges"]},
        "noise": {"gates": gates, "overrotation": [], "readout": readout},
    }
    out = ROOT / "data" / "profiles" / "toronto_like.json"
    out.write_text(json.dumps(profile, indent=1) + "\n")


if __name__ == "__main__":
    main()
