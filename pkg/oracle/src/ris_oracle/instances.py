"""Reader for the plain-text instance interchange format.

Deliberately independent of the solver package: the oracle only ever
sees exported files.  Complex matrices arrive as separate re/im nested
lists; Python floats round-trip exactly through JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FORMAT_TAG = "risbc-instance-v1"


def _decode(d: dict) -> np.ndarray:
    a = np.asarray(d["re"], dtype=np.float64) + 1j * np.asarray(d["im"], dtype=np.float64)
    return a.reshape(d["shape"]) if a.size else np.zeros(d["shape"], dtype=np.complex128)


@dataclass
class OracleInstance:
    path: Path
    power: float
    h_list: list
    components: dict | None = None
    covariances: list | None = None
    primary: dict = field(default_factory=dict)
    phase_probe: dict | None = None

    @property
    def n_users(self) -> int:
        return len(self.h_list)


def load_instance(path) -> OracleInstance:
    path = Path(path)
    doc = json.loads(path.read_text())
    if doc.get("format") != FORMAT_TAG:
        raise ValueError(f"{path}: unrecognized format tag {doc.get('format')!r}")
    inst = OracleInstance(
        path=path,
        power=float(doc["power"]),
        h_list=[_decode(d) for d in doc["channels"]],
        primary=doc.get("primary", {}))
    if "components" in doc:
        comp = doc["components"]
        inst.components = {
            "direct": [_decode(d) for d in comp["direct"]],
            "ris_user": [_decode(d) for d in comp["ris_user"]],
            "bs_ris": _decode(comp["bs_ris"]),
            "theta": _decode(comp["theta"]).reshape(-1),
        }
    if "covariances" in doc:
        inst.covariances = [_decode(d) for d in doc["covariances"]]
    if "phase_probe" in doc:
        probe = dict(doc["phase_probe"])
        star = probe.get("theta_star")
        if star is not None:
            probe["theta_star"] = complex(star["re"], star["im"])
        inst.phase_probe = probe
    return inst


def find_instances(directory, prefix: str) -> list:
    paths = sorted(Path(directory).glob(f"{prefix}_*.json"))
    if not paths:
        raise FileNotFoundError(
            f"no {prefix}_*.json instances under {directory}")
    return paths
