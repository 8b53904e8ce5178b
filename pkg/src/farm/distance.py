"""Dual-branch angular distance between two slope features.

Two slopes of the same sign are compared by the sine of the angle between
their unit-step vectors ``(1, delta)``. Slopes of opposite sign, or pairs
involving a zero slope, are compared by an exponential penalty on their
absolute difference, which grows fast enough to rank every such pair behind
same-sign pairs of comparable angular gap.
"""

import math
import sys
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ._validation import check_finite_scalar
from .exceptions import InvalidInputError

__all__ = [
    "DistanceParams",
    "SATURATION_VALUE",
    "vector_angle",
    "farm_distance",
    "farm_distance_array",
    "CrossoverReport",
    "transfer_crossover_scan",
]

#: Value returned by the exponential branch when ``exp`` would overflow.
SATURATION_VALUE = sys.float_info.max
_EXP_LIMIT = math.log(SATURATION_VALUE)


@dataclass(frozen=True)
class DistanceParams:
    """Parameters of :func:`farm_distance`.

    Parameters
    ----------
    exp_scale : float, default 5.0
        Multiplier applied to the exponent of the opposite-sign branch.
        ``exp_scale=1`` gives the unscaled penalty ``exp(|a - b|) - 1``.
    """

    exp_scale: float = 5.0

    def __post_init__(self):
        scale = check_finite_scalar(self.exp_scale, "exp_scale")
        if scale <= 0:
            raise InvalidInputError(f"exp_scale must be > 0, got {scale}")
        object.__setattr__(self, "exp_scale", scale)


_DEFAULT_PARAMS = DistanceParams()


def vector_angle(delta):
    """Angle in radians of the vector ``(1, delta)``, in ``(-pi/2, pi/2)``."""
    return math.atan(check_finite_scalar(delta, "delta"))


def _sine_gap(a, b):
    # sin(atan a - atan b) == (a - b) / (sqrt(1 + a^2) sqrt(1 + b^2)); the
    # closed form keeps distinct slopes at a nonzero distance even where atan
    # rounds both to the same angle. Operands are ordered so that the result
    # is bitwise symmetric.
    if a > b:
        a, b = b, a
    return ((b - a) / math.hypot(1.0, a)) / math.hypot(1.0, b)


def _exp_penalty(a, b, scale):
    exponent = scale * abs(a - b)
    if exponent > _EXP_LIMIT:
        return SATURATION_VALUE, True
    value = math.expm1(exponent)
    if math.isinf(value):
        return SATURATION_VALUE, True
    return value, False


def farm_distance(delta_ref, delta_qry, params=None, *, return_saturated=False):
    """Distance between a reference slope and a query slope.

    Parameters
    ----------
    delta_ref, delta_qry : float
        Finite slopes (consecutive differences).
    params : DistanceParams, optional
    return_saturated : bool, default False
        Also return whether the exponential branch was clipped to
        :data:`SATURATION_VALUE`.

    Returns
    -------
    float or (float, bool)

    Examples
    --------
    >>> round(farm_distance(1.0, 0.5), 6)
    0.316228
    >>> round(farm_distance(0.2, -0.2), 6)
    6.389056
    """
    a = check_finite_scalar(delta_ref, "delta_ref")
    b = check_finite_scalar(delta_qry, "delta_qry")
    params = _DEFAULT_PARAMS if params is None else params
    if (a > 0 and b > 0) or (a < 0 and b < 0):
        value, saturated = _sine_gap(a, b), False
    else:
        value, saturated = _exp_penalty(a, b, params.exp_scale)
    if return_saturated:
        return value, saturated
    return value


def _distance_unchecked(a, b, scale):
    # hot path for alignment: inputs are already validated floats
    if (a > 0.0 and b > 0.0) or (a < 0.0 and b < 0.0):
        if a > b:
            a, b = b, a
        return ((b - a) / math.hypot(1.0, a)) / math.hypot(1.0, b)
    exponent = scale * abs(a - b)
    if exponent > _EXP_LIMIT:
        return SATURATION_VALUE
    return math.expm1(exponent)


def farm_distance_array(delta_ref, delta_qry, params=None):
    """Elementwise :func:`farm_distance` over broadcast arrays."""
    a = np.asarray(delta_ref, dtype=float)
    b = np.asarray(delta_qry, dtype=float)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise InvalidInputError("deltas must be finite")
    scale = (_DEFAULT_PARAMS if params is None else params).exp_scale
    a, b = np.broadcast_arrays(a, b)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    same = ((a > 0) & (b > 0)) | ((a < 0) & (b < 0))
    sine = ((hi - lo) / np.hypot(1.0, lo)) / np.hypot(1.0, hi)
    exponent = scale * (hi - lo)
    with np.errstate(over="ignore"):
        expo = np.where(exponent > _EXP_LIMIT, SATURATION_VALUE,
                        np.expm1(np.minimum(exponent, _EXP_LIMIT)))
    return np.where(same, sine, expo)


@dataclass
class CrossoverReport:
    """Result of :func:`transfer_crossover_scan`.

    ``envelope_gaps``/``envelope_margins`` hold, per angular-gap bin of
    width ``grid_step`` radians, the smallest observed
    ``exp_penalty - sin(gap)`` over the scanned opposite-sign pairs.
    """

    exp_scale: float
    grid_step: float
    failing_gaps: List[float]
    max_failing_gap: Optional[float]
    boundary_ties: int = 0
    n_pairs: int = 0
    delta_range: tuple = (-10.0, 10.0)
    envelope_gaps: np.ndarray = field(default_factory=lambda: np.empty(0))
    envelope_margins: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def ordering_holds(self):
        return not self.failing_gaps

    def to_dict(self):
        return {
            "exp_scale": self.exp_scale,
            "grid_step": self.grid_step,
            "failing_gaps": list(self.failing_gaps),
            "max_failing_gap": self.max_failing_gap,
            "boundary_ties": self.boundary_ties,
            "n_pairs": self.n_pairs,
            "delta_range": list(self.delta_range),
        }

    @classmethod
    def from_dict(cls, data, envelope=None):
        gaps, margins = envelope if envelope is not None else (np.empty(0), np.empty(0))
        return cls(
            exp_scale=data["exp_scale"],
            grid_step=data["grid_step"],
            failing_gaps=list(data["failing_gaps"]),
            max_failing_gap=data["max_failing_gap"],
            boundary_ties=data.get("boundary_ties", 0),
            n_pairs=data.get("n_pairs", 0),
            delta_range=tuple(data.get("delta_range", (-10.0, 10.0))),
            envelope_gaps=np.asarray(gaps, dtype=float),
            envelope_margins=np.asarray(margins, dtype=float),
        )


def transfer_crossover_scan(params=None, grid_step=0.01, delta_range=(-10.0, 10.0)):
    """Check that the exponential branch dominates the sine of the angular gap.

    Every pair of grid slopes ``(a, b)`` routed to the exponential branch
    (``a * b <= 0``) is compared against ``sin(|atan a - atan b|)``, the
    distance the pair would receive if it were scored by angle alone.

    Parameters
    ----------
    params : DistanceParams, optional
    grid_step : float
        Spacing of the slope grid.
    delta_range : (float, float)
        Inclusive bounds of the slope grid.

    Returns
    -------
    CrossoverReport
        ``failing_gaps`` lists the distinct angular gaps (rounded to 12
        digits) where the penalty is strictly below the sine. Pairs where
        both are zero are counted in ``boundary_ties``.
    """
    params = _DEFAULT_PARAMS if params is None else params
    grid_step = check_finite_scalar(grid_step, "grid_step")
    if grid_step <= 0:
        raise InvalidInputError(f"grid_step must be > 0, got {grid_step}")
    lo, hi = (check_finite_scalar(v, "delta_range") for v in delta_range)
    if hi < lo:
        raise InvalidInputError("delta_range must be (low, high) with low <= high")

    n = int(math.floor((hi - lo) / grid_step + 1e-9)) + 1
    grid = lo + grid_step * np.arange(n)
    grid[np.isclose(grid, 0.0, atol=grid_step * 1e-6)] = 0.0
    nonneg = grid[grid >= 0]
    nonpos = grid[grid <= 0]
    # a >= 0 >= b covers every exponential-branch pair up to symmetry
    a = nonneg[:, None]
    b = nonpos[None, :]
    gap = np.abs(np.arctan(a) - np.arctan(b))
    sine = np.sin(gap)
    with np.errstate(over="ignore"):
        penalty = np.expm1(params.exp_scale * (a - b))
    margin = (penalty - sine).ravel()
    gap = gap.ravel()

    ties = int(np.count_nonzero((margin == 0) & (gap == 0)))
    failing = margin < 0
    failing_gaps = sorted(set(np.round(gap[failing], 12).tolist()))

    bins = np.floor(gap / grid_step).astype(np.int64)
    order = np.argsort(bins, kind="stable")
    uniq, start = np.unique(bins[order], return_index=True)
    env_margin = np.minimum.reduceat(margin[order], start)

    return CrossoverReport(
        exp_scale=params.exp_scale,
        grid_step=grid_step,
        failing_gaps=failing_gaps,
        max_failing_gap=max(failing_gaps) if failing_gaps else None,
        boundary_ties=ties,
        n_pairs=int(margin.size),
        delta_range=(lo, hi),
        envelope_gaps=uniq * grid_step,
        envelope_margins=env_margin,
    )
