"""Complex-multiplication counters for the dominant numerical kernels.

The counts are nominal (leading-order terms with unit constants) and are
reported as diagnostics next to the closed-form per-iteration complexity
estimate; they are not asserted equal to it.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class MultCounter:
    compose: int = 0      # effective-channel composition
    covariance: int = 0   # water-filling stage kernels
    phase: int = 0        # per-element phase-update kernels

    @property
    def total(self) -> int:
        return self.compose + self.covariance + self.phase

    def merged_with(self, other: "MultCounter") -> "MultCounter":
        return MultCounter(
            compose=self.compose + other.compose,
            covariance=self.covariance + other.covariance,
            phase=self.phase + other.phase,
        )
