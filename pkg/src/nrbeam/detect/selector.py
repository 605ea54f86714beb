"""Detection selector: arbitrates between the correlator and a learned detector."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Literal

Branch = Literal["correlation", "learner"]


@dataclass
class SelectorState:
    window_size: int = 100
    threshold: float = 0.95
    hysteresis: float = 0.05
    active: Branch = "correlation"
    window: deque = field(default=None)
    switches: int = 0

    def __post_init__(self):
        if self.window_size < 1:
            raise ValueError("window_size must be >= 1")
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must lie in (0, 1)")
        if not 0 <= self.hysteresis < self.threshold:
            raise ValueError("hysteresis must lie in [0, threshold)")
        if self.window is None:
            self.window = deque(maxlen=self.window_size)

    @property
    def rate(self) -> float:
        return sum(self.window) / len(self.window) if self.window else 0.0

    @property
    def full(self) -> bool:
        return len(self.window) == self.window_size


def selector_step(
    state: SelectorState,
    corr_issb: int,
    learner_issb: int | None = None,
    feedback: bool | None = None,
) -> int:
    """Emit the active branch's decision, then fold in feedback and maybe switch.

    ``feedback`` says whether the learner's hypothesis was right (shadow CRC
    under the learner's index, or ground truth in simulation). It is ignored
    while no learner output exists.
    """
    chosen = learner_issb if state.active == "learner" and learner_issb is not None else corr_issb
    if learner_issb is None or feedback is None:
        return int(chosen)
    state.window.append(bool(feedback))
    if state.active == "correlation":
        if state.full and state.rate >= state.threshold:
            state.active = "learner"
            state.switches += 1
    elif state.rate < state.threshold - state.hysteresis:
        state.active = "correlation"
        state.switches += 1
    return int(chosen)
