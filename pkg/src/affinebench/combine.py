"""Log-space affine combination of two problem instances.

The blend of shifted values d1 = F_a(x) - F_a(O1) and
d2 = F_b(x - O1 + O2) - F_b(O2) is exp(alpha ln d1 + (1-alpha) ln d2), i.e.
a weighted geometric mean.  Translating the second function's argument moves
its optimum onto O1, so the combined optimum sits at O1 for every alpha.
Both shifted values are floored at ``floor_eps`` before the logs, which makes
evaluation total: the minimum attainable value is the floor, reached at O1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .suite import ProblemInstance

DEFAULT_FLOOR = 1e-12


class NonFiniteValueError(ArithmeticError):
    """A base function produced a non-finite value."""


@dataclass(frozen=True)
class CombinedProblem:
    first: ProblemInstance
    second: ProblemInstance
    alpha: float
    floor_eps: float = DEFAULT_FLOOR

    @property
    def dimension(self) -> int:
        return self.first.dimension

    @property
    def optimum_location(self) -> np.ndarray:
        return self.first.optimum_location

    def evaluate(self, x):
        """Blended value(s); accepts one point (D,) or a batch (N, D).

        At alpha 0 or 1 only the active side is evaluated.  Equal floored
        operands short-circuit to their common value, so the optimum returns
        exactly ``floor_eps``; elsewhere the result is clamped back to the
        floor because the exp/log round trip can round a hair below it.
        """
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        pts = np.atleast_2d(arr)
        if pts.ndim != 2 or pts.shape[1] != self.dimension:
            raise ValueError(
                f"expected points of dimension {self.dimension}, got shape {arr.shape}"
            )

        eps = self.floor_eps
        if self.alpha == 1.0:
            out = np.maximum(self._shifted_first(pts), eps)
        elif self.alpha == 0.0:
            out = np.maximum(self._shifted_second(pts), eps)
        else:
            d1 = np.maximum(self._shifted_first(pts), eps)
            d2 = np.maximum(self._shifted_second(pts), eps)
            blended = np.exp(
                self.alpha * np.log(d1) + (1.0 - self.alpha) * np.log(d2)
            )
            out = np.where(d1 == d2, d1, np.maximum(blended, eps))
        if not np.all(np.isfinite(out)):
            first_id = getattr(self.first, "function_id", "?")
            second_id = getattr(self.second, "function_id", "?")
            raise NonFiniteValueError(
                f"non-finite value combining F{first_id} and F{second_id} "
                f"at alpha {self.alpha}"
            )
        return float(out[0]) if single else out

    __call__ = evaluate

    def _shifted_first(self, pts: np.ndarray) -> np.ndarray:
        base = self.first.evaluate(self.first.optimum_location)
        return self.first.evaluate(pts) - base

    def _shifted_second(self, pts: np.ndarray) -> np.ndarray:
        moved = pts - self.first.optimum_location + self.second.optimum_location
        base = self.second.evaluate(self.second.optimum_location)
        return self.second.evaluate(moved) - base


def combine(
    first: ProblemInstance,
    second: ProblemInstance,
    alpha: float,
    floor_eps: float = DEFAULT_FLOOR,
) -> CombinedProblem:
    """Validated constructor for :class:`CombinedProblem`."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if first.dimension != second.dimension:
        raise ValueError(
            f"dimension mismatch: {first.dimension} vs {second.dimension}"
        )
    if floor_eps <= 0.0:
        raise ValueError(f"floor_eps must be positive, got {floor_eps}")
    return CombinedProblem(first=first, second=second, alpha=alpha, floor_eps=floor_eps)
