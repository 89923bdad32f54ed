"""Random streams, resampling and the special functions behind the p-values.

Every stochastic routine takes an explicit :class:`RngStream`; nothing here
touches global random state.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import RadiusError

ALGORITHM_ID = "numpy-PCG64/SeedSequence"

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 20000


class DomainError(RadiusError, ValueError):
    pass


def _key_words(key: str) -> tuple[int, ...]:
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return tuple(int.from_bytes(digest[i : i + 4], "little") for i in range(0, 32, 4))


class RngStream:
    """A seeded PCG64 stream that can be split into named substreams.

    Substreams depend only on the root seed and the chain of keys, never on how
    much of the parent has been consumed, so per-question work gives the same
    draws whatever order (or process) it runs in.
    """

    algorithm_id = ALGORITHM_ID

    def __init__(self, seed: int, _path: tuple[str, ...] = ()):
        if not 0 <= int(seed) < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self.path = _path
        spawn_key: tuple[int, ...] = ()
        for key in _path:
            spawn_key += _key_words(key)
        self._ss = np.random.SeedSequence(self.seed, spawn_key=spawn_key)
        self.generator = np.random.Generator(np.random.PCG64(self._ss))

    def substream(self, key: str) -> RngStream:
        return RngStream(self.seed, self.path + (str(key),))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, path={self.path!r})"


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float

    def overlaps(self, other: ConfidenceInterval) -> bool:
        return self.lower <= other.upper and other.lower <= self.upper

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _probability_vector(p: Sequence[float]) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("probability vector must be one-dimensional and non-empty")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DomainError("probability entries must be finite and non-negative")
    s = arr.sum()
    if abs(s - 1.0) > 1e-9:
        raise DomainError(f"probabilities sum to {s}, not 1")
    return arr / s


def multinomial_sample(rng: RngStream, n: int, p: Sequence[float], size: int | None = None) -> np.ndarray:
    """Draw ``n`` categorical outcomes with probabilities ``p`` and return the counts."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    probs = _probability_vector(p)
    return rng.generator.multinomial(int(n), probs, size=size).astype(np.int64)


def bootstrap_proportions(rng: RngStream, counts: Sequence[int], n_boot: int) -> np.ndarray:
    """Resampled proportion matrix of shape (n_boot, k)."""
    if n_boot < 2:
        raise DomainError(f"n_boot must be >= 2, got {n_boot}")
    c = np.asarray(counts, dtype=np.int64)
    total = int(c.sum())
    if total < 1:
        raise DomainError("cannot bootstrap an empty distribution")
    draws = multinomial_sample(rng, total, c / total, size=n_boot)
    return draws / total


def percentile_intervals(samples: np.ndarray, level: float) -> list[ConfidenceInterval]:
    if not 0 < level < 1:
        raise DomainError(f"level must be in (0, 1), got {level}")
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(samples, [tail, 1.0 - tail], axis=0)
    return [
        ConfidenceInterval(float(min(max(a, 0.0), 1.0)), float(min(max(b, 0.0), 1.0)), level)
        for a, b in zip(lo, hi)
    ]


def bootstrap_proportion_cis(
    rng: RngStream, counts: Sequence[int], n_boot: int = 1000, level: float = 0.95
) -> list[ConfidenceInterval]:
    """Percentile bootstrap interval for each option's proportion."""
    if not 0 < level < 1:
        raise DomainError(f"level must be in (0, 1), got {level}")
    return percentile_intervals(bootstrap_proportions(rng, counts, n_boot), level)


# -- special functions ------------------------------------------------------


def _gamma_series(a: float, x: float) -> float:
    # lower regularized P(a, x), valid for x < a + 1
    ap = a
    term = total = 1.0 / a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    else:
        raise ArithmeticError(f"gamma series did not converge for a={a}, x={x}")
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf(a: float, x: float) -> float:
    # upper regularized Q(a, x) by modified Lentz, valid for x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise ArithmeticError(f"gamma continued fraction did not converge for a={a}, x={x}")
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gammaincc(a: float, x: float) -> float:
    """Upper regularized incomplete gamma Q(a, x)."""
    if a <= 0 or x < 0:
        raise DomainError(f"gammaincc requires a > 0, x >= 0 (got a={a}, x={x})")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cf(a, x)


def gammainc(a: float, x: float) -> float:
    """Lower regularized incomplete gamma P(a, x)."""
    if a <= 0 or x < 0:
        raise DomainError(f"gammainc requires a > 0, x >= 0 (got a={a}, x={x})")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_cf(a, x)


def _beta_cf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise ArithmeticError(f"beta continued fraction did not converge for a={a}, b={b}, x={x}")
    return h


def betainc(a: float, b: float, x: float, y: float | None = None) -> float:
    """Regularized incomplete beta I_x(a, b).

    ``y`` may carry 1 - x computed without cancellation by the caller.
    """
    if y is None:
        y = 1.0 - x
    if a <= 0 or b <= 0 or not 0 <= x <= 1:
        raise DomainError(f"betainc requires a, b > 0 and 0 <= x <= 1 (got a={a}, b={b}, x={x})")
    if x == 0:
        return 0.0
    if y == 0:
        return 1.0
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log(y)
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, y) / b


def chi_square_sf(x: float, df: float) -> float:
    """P(X >= x) for a chi-square variable with ``df`` degrees of freedom."""
    if df <= 0 or math.isnan(df):
        raise DomainError(f"df must be positive, got {df}")
    if x < 0 or math.isnan(x):
        raise DomainError(f"x must be non-negative, got {x}")
    return min(1.0, max(0.0, gammaincc(df / 2.0, x / 2.0)))


def student_t_sf2(t: float, df: float) -> float:
    """Two-sided p-value 2 P(T >= |t|) for Student's t with ``df`` degrees of freedom."""
    if df <= 0 or math.isnan(df):
        raise DomainError(f"df must be positive, got {df}")
    if math.isnan(t):
        raise DomainError("t is NaN")
    if math.isinf(t):
        return 0.0
    t2 = t * t
    denom = df + t2
    return min(1.0, max(0.0, betainc(df / 2.0, 0.5, df / denom, t2 / denom)))
