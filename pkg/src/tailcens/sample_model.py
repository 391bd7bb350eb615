"""Core data types for right-censored samples and their order statistics.

A censored observation is a pair (z, delta): z is the observed time
(minimum of the lifetime and an independent censoring time) and delta
indicates whether the lifetime itself was observed (delta = 1) or the
censoring time (delta = 0).  Every estimator in this package operates on
an :class:`OrderedSample`, i.e. the z values sorted increasingly with the
censoring indicators carried along as concomitants.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class InvalidSampleError(ValueError):
    """Raised when input observations violate the sample contract."""


@dataclass(frozen=True)
class CensoredObservation:
    """One observed time with its censoring indicator.

    z must be strictly positive, delta must be 0 or 1.
    """

    z: float
    delta: int

    def __post_init__(self):
        if not (self.z > 0):
            raise InvalidSampleError(f"invalid observation: z={self.z} must be > 0")
        if self.delta not in (0, 1):
            raise InvalidSampleError(f"invalid observation: delta={self.delta} must be 0 or 1")


@dataclass(frozen=True)
class OrderedSample:
    """Sorted observed times with concomitant censoring indicators.

    ``z_sorted[i]`` is the (i+1)-th order statistic; ``delta_concomitant[i]``
    is the indicator of the observation whose z became ``z_sorted[i]``.
    Arrays are read-only after construction.
    """

    z_sorted: np.ndarray
    delta_concomitant: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z_sorted, dtype=float)
        d = np.asarray(self.delta_concomitant, dtype=np.int8)
        if z.ndim != 1 or d.ndim != 1 or z.size != d.size:
            raise InvalidSampleError("z_sorted and delta_concomitant must be 1-d and equal length")
        if z.size == 0:
            raise InvalidSampleError("empty sample")
        if np.any(z <= 0) or not np.all(np.isfinite(z)):
            raise InvalidSampleError("invalid observation: all z must be positive and finite")
        if np.any(np.diff(z) < 0):
            raise InvalidSampleError("z_sorted must be nondecreasing")
        if not np.isin(d, (0, 1)).all():
            raise InvalidSampleError("delta values must be 0 or 1")
        z.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "z_sorted", z)
        object.__setattr__(self, "delta_concomitant", d)

    @property
    def n(self) -> int:
        return self.z_sorted.size


@dataclass(frozen=True)
class TailConfig:
    """Estimation window: number of top order statistics k and MDPD tuning alpha."""

    k: int
    alpha: float = 0.0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k={self.k} must be >= 1")
        if self.alpha < 0:
            raise ValueError(f"alpha={self.alpha} must be >= 0")

    def check_against(self, n: int) -> None:
        if not 1 <= self.k <= n - 1:
            raise ValueError(f"k={self.k} out of range for sample size n={n}")


@dataclass(frozen=True)
class ModelParams:
    """True model parameters for simulation and asymptotic constants.

    gamma1 is the lifetime tail index, gamma2 the censoring tail index,
    eta the Burr shape and tau1 the (nonpositive) second-order parameter.
    """

    gamma1: float
    gamma2: float
    eta: float = 0.25
    tau1: float = 0.0

    def __post_init__(self):
        if self.gamma1 <= 0 or self.gamma2 <= 0:
            raise ValueError("gamma1 and gamma2 must be positive")
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.tau1 > 0:
            raise ValueError("tau1 must be nonpositive")

    @property
    def p(self) -> float:
        """Limiting fraction of uncensored observations among the largest ones."""
        return self.gamma2 / (self.gamma1 + self.gamma2)

    @property
    def q(self) -> float:
        return self.gamma1 / (self.gamma1 + self.gamma2)

    @property
    def gamma(self) -> float:
        """Tail index of the observed minimum Z."""
        return self.gamma1 * self.gamma2 / (self.gamma1 + self.gamma2)


def order_sample(observations: Iterable[CensoredObservation]) -> OrderedSample:
    """Sort observations by z (stable in input order) carrying deltas as concomitants."""
    obs = list(observations)
    if not obs:
        raise InvalidSampleError("empty sample")
    z = np.array([o.z for o in obs], dtype=float)
    d = np.array([o.delta for o in obs], dtype=np.int8)
    return ordered_from_arrays(z, d)


def ordered_from_arrays(z: Sequence[float], delta: Sequence[int]) -> OrderedSample:
    """Build an OrderedSample from parallel arrays of times and indicators."""
    z = np.asarray(z, dtype=float)
    d = np.asarray(delta)
    if z.size == 0:
        raise InvalidSampleError("empty sample")
    if np.any(z <= 0) or not np.all(np.isfinite(z)):
        raise InvalidSampleError("invalid observation: all z must be positive and finite")
    idx = np.argsort(z, kind="stable")
    return OrderedSample(z[idx], d[idx])


def top_log_excesses(sample: OrderedSample, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Log-excesses of the k largest observations over the (k+1)-th largest.

    Returns arrays (L, delta) indexed i = 1..k with i = 1 the largest
    observation: L[i-1] = log(Z_{n-i+1:n} / Z_{n-k:n}) and delta[i-1] its
    concomitant indicator.
    """
    n = sample.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} out of range for sample size n={n}")
    threshold = sample.z_sorted[n - k - 1]
    if threshold <= 0:
        raise ValueError("zero threshold")
    top = sample.z_sorted[n - k:][::-1]
    deltas = sample.delta_concomitant[n - k:][::-1].copy()
    return np.log(top / threshold), deltas
