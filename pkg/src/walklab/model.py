"""Walk parameters and the scalar constants derived from them.

Everything downstream (closed-form laws, boundary geometry, simulation)
is a function of a single validated parameter set: the up-step
probability p in (1/2, 1), its complement q = 1 - p and the ratio
h = q/p < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError

__all__ = ["WalkParams", "Constants", "make_params", "derived_constants"]


@dataclass(frozen=True)
class WalkParams:
    """Validated parameters of the drifted nearest-neighbor walk."""

    p: float
    q: float
    h: float

    @property
    def log_h(self) -> float:
        return math.log(self.h)


@dataclass(frozen=True)
class Constants:
    """Scalar constants attached to one parameter set.

    gamma0    probability of never returning to the start, p - q
    lambda0   a.s. rate (per log n) of the maximal local time, -1/log(2q)
    kappa0    a.s. rate of the maximal unit-sphere occupation,
              -1/log(q(1+2p))
    beta      sqrt(1 + 8p/q), governs the three-site ball occupation law
    wlimit    a.s. rate of the maximal ball weight (local time plus
              sphere occupation), -1/log(q(1+beta)/2)
    """

    params: WalkParams
    gamma0: float
    lambda0: float
    kappa0: float
    beta: float
    wlimit: float

    def theta(self, z: int) -> float:
        """Decay rate of the two-point occupation law for sites {0, z}.

        Strictly decreasing in z > 0 with limit 1/lambda0.
        """
        if z <= 0:
            raise ValidationError(f"theta is defined for z > 0, got z={z}")
        p, q, h = self.params.p, self.params.q, self.params.h
        hz2 = math.exp(0.5 * z * math.log(h))
        return -math.log((2.0 * q + hz2) / (1.0 + hz2))


def make_params(p: float) -> WalkParams:
    """Validate p and build the parameter triple (p, q, h)."""
    if not math.isfinite(p):
        raise ValidationError(f"p must be a finite real, got {p!r}")
    if p <= 0.5:
        raise ValidationError(
            f"p={p} violates p > 1/2 (the walk must drift to the right)"
        )
    if p >= 1.0:
        raise ValidationError(f"p={p} violates p < 1 (both steps need mass)")
    q = 1.0 - p
    return WalkParams(p=p, q=q, h=q / p)


def ball_weight_rate(params: WalkParams) -> float:
    """Closed form for wlimit: -1/log of the dominant base q(1+beta)/2.

    The boundary module cross-checks this against two independent
    routes (numeric maximization of x+y on the region boundary and the
    coefficient-ratio limit of the ball occupation generating function).
    """
    beta = math.sqrt(1.0 + 8.0 * params.p / params.q)
    return -1.0 / math.log(params.q * (1.0 + beta) / 2.0)


def derived_constants(params: WalkParams) -> Constants:
    p, q = params.p, params.q
    return Constants(
        params=params,
        gamma0=p - q,
        lambda0=-1.0 / math.log(2.0 * q),
        kappa0=-1.0 / math.log(q * (1.0 + 2.0 * p)),
        beta=math.sqrt(1.0 + 8.0 * p / q),
        wlimit=ball_weight_rate(params),
    )
