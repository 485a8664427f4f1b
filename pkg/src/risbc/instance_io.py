"""Plain-text interchange of solver instances for external validation.

An instance file is JSON carrying the effective channels and power
budget, optionally the raw channel components, covariances, phases, the
solver's own results, and a single-element phase probe.  Complex
matrices are stored as separate real/imaginary nested lists with
explicit dimensions implied by the nesting; Python's float repr
round-trips IEEE doubles exactly, so export -> import -> export is
byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FORMAT_TAG = "risbc-instance-v1"


def encode_complex(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=np.complex128)
    return {"shape": list(a.shape),
            "re": a.real.tolist(),
            "im": a.imag.tolist()}


def decode_complex(d: dict) -> np.ndarray:
    a = np.asarray(d["re"], dtype=np.float64) + 1j * np.asarray(d["im"], dtype=np.float64)
    return a.reshape(d["shape"]) if a.size else np.zeros(d["shape"], dtype=np.complex128)


@dataclass
class Instance:
    """In-memory form of one interchange file."""

    power: float
    h_list: list                         # effective channels, one per user
    components: dict | None = None       # {"direct": [...], "ris_user": [...],
                                         #  "bs_ris": ..., "theta": ...}
    covariances: list | None = None
    primary: dict = field(default_factory=dict)   # solver-reported scalars
    phase_probe: dict | None = None      # {"l": int, "theta_star": complex|None,
                                         #  "objective_bits": float}

    @property
    def n_users(self) -> int:
        return len(self.h_list)

    @property
    def n_t(self) -> int:
        return self.h_list[0].shape[1]


def save_instance(path, instance: Instance):
    doc = {
        "format": FORMAT_TAG,
        "power": instance.power,
        "channels": [encode_complex(h) for h in instance.h_list],
        "primary": instance.primary,
    }
    if instance.components is not None:
        comp = instance.components
        doc["components"] = {
            "direct": [encode_complex(m) for m in comp["direct"]],
            "ris_user": [encode_complex(m) for m in comp["ris_user"]],
            "bs_ris": encode_complex(comp["bs_ris"]),
            "theta": encode_complex(np.asarray(comp["theta"]).reshape(-1)),
        }
    if instance.covariances is not None:
        doc["covariances"] = [encode_complex(s) for s in instance.covariances]
    if instance.phase_probe is not None:
        probe = dict(instance.phase_probe)
        star = probe.get("theta_star")
        probe["theta_star"] = None if star is None else \
            {"re": float(np.real(star)), "im": float(np.imag(star))}
        doc["phase_probe"] = probe
    path = Path(path)
    path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    return path


def load_instance(path) -> Instance:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != FORMAT_TAG:
        raise ValueError(f"unrecognized instance format in {path}")
    inst = Instance(
        power=float(doc["power"]),
        h_list=[decode_complex(d) for d in doc["channels"]],
        primary=doc.get("primary", {}),
    )
    if "components" in doc:
        comp = doc["components"]
        inst.components = {
            "direct": [decode_complex(d) for d in comp["direct"]],
            "ris_user": [decode_complex(d) for d in comp["ris_user"]],
            "bs_ris": decode_complex(comp["bs_ris"]),
            "theta": decode_complex(comp["theta"]).reshape(-1),
        }
    if "covariances" in doc:
        inst.covariances = [decode_complex(d) for d in doc["covariances"]]
    if "phase_probe" in doc:
        probe = dict(doc["phase_probe"])
        star = probe.get("theta_star")
        probe["theta_star"] = None if star is None else \
            complex(star["re"], star["im"])
        inst.phase_probe = probe
    return inst
