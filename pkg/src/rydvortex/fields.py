from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ComplexField2D:
    """Complex samples ``values[i, j]`` at ``(x[i], y[j])``."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    x_name: str = "x"
    y_name: str = "y"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.values.shape != (self.x.size, self.y.size):
            raise ValueError(f"values shape {self.values.shape} does not match axes "
                             f"({self.x.size}, {self.y.size})")

    @property
    def abs2(self):
        return np.abs(self.values) ** 2

    @property
    def phase(self):
        return np.angle(self.values)
