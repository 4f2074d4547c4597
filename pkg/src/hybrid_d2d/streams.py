"""Counter-based random streams.

Every Monte Carlo trial owns a family of independent Philox streams addressed
by ``(master_seed, trial, substream)``. The master seed fixes the Philox key;
the trial and substream indices are written into the two high words of the
256-bit counter, so streams never overlap unless one of them consumes 2**128
blocks. Results therefore depend only on the trial index, never on which
worker ran the trial or in which order.
"""

from __future__ import annotations

import numpy as np

# substream ids within one trial
PHI_BASE = 0
PHI_ALPHA = 1
PHI_LOAD = 2
PHI_FADING = 3
PSI_BASE = 4
PSI_ALPHA = 5
PSI_LOAD = 6
PSI_FADING = 7
LINK_FADING = 8


def master_key(master_seed: int) -> np.ndarray:
    return np.random.SeedSequence(int(master_seed)).generate_state(2, np.uint64)


class TrialStreams:
    """The substreams of one trial."""

    __slots__ = ("key", "trial")

    def __init__(self, master_seed: int, trial: int, key: np.ndarray | None = None):
        if trial < 0:
            raise ValueError("trial index must be >= 0")
        self.key = master_key(master_seed) if key is None else key
        self.trial = int(trial)

    def stream(self, substream: int) -> np.random.Generator:
        bitgen = np.random.Philox(key=self.key, counter=[0, 0, int(substream), self.trial])
        return np.random.Generator(bitgen)

    @classmethod
    def from_generator(cls, rng: np.random.Generator) -> "TrialStreams":
        """Derive a stream family from an ordinary generator (single-trial use)."""
        seed = int(rng.integers(0, 2**63))
        return cls(seed, 0)


def trial_streams(master_seed: int, trials) -> list[TrialStreams]:
    key = master_key(master_seed)
    return [TrialStreams(master_seed, int(i), key=key) for i in trials]
