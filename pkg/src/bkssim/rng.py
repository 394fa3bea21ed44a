"""Counter-based random streams keyed by (master seed, shot index).

Every uniform is a pure function of ``(master_seed, shot_index, draw)``, so a
shot's draws do not depend on which worker ran it or on how many shots came
before. The mixer is the SplitMix64 finalizer. Scalar and vectorised paths
share one implementation and agree bit for bit.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1

# Draw slot reserved for the depolarizing-noise decision.
NOISE_DRAW = 15
# Draw slot for the replacement outcome of a depolarized shot.
NOISE_OUTCOME_DRAW = 14


def _mix(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + _GAMMA
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def _as_u64(value) -> np.ndarray:
    return np.asarray(value, dtype=np.uint64)


def uniforms(master_seed: int, shot_indices, draw: int) -> np.ndarray:
    """Uniform doubles in [0, 1) for draw number ``draw`` of each listed shot."""
    if not 0 <= master_seed <= _MASK64:
        raise ValueError("master_seed must be a 64-bit unsigned integer")
    seed_key = _mix(_as_u64(master_seed))
    with np.errstate(over="ignore"):
        h = _mix(seed_key ^ _mix(_as_u64(shot_indices)))
        h = _mix(h + _as_u64(draw))
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


class ShotStream:
    """Sequential draws for one shot; draw ``k`` equals ``uniforms(seed, [shot], k)``."""

    def __init__(self, master_seed: int, shot_index: int):
        if shot_index < 0:
            raise ValueError("shot_index must be non-negative")
        self.master_seed = int(master_seed)
        self.shot_index = int(shot_index)
        self.draws = 0

    @property
    def identifier(self) -> str:
        return f"{self.master_seed}:{self.shot_index}"

    def draw(self, slot: int) -> float:
        """Draw at an explicit slot without advancing the sequential counter."""
        return float(uniforms(self.master_seed, self.shot_index, slot))

    def uniform(self) -> float:
        u = self.draw(self.draws)
        self.draws += 1
        return u
