"""Pure scoring functions: Wilson interval bounds, spotlight indices, blends.

Everything in this module is a stateless function of its arguments, so it is
safe to call concurrently.  The combined score for one answer is

    score = p_weight * wilson_bound + (1 - p_weight) * spotlight_index

where the Wilson bound is the classic "sort by confidence" interval bound for
the up-vote proportion, and the spotlight index measures how much voting
attention the answer has received relative to the most-voted answer under the
same question.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class ConfigError(ValueError):
    """Raised by :func:`validate_config`; names the offending field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class VoteTally:
    """Up/down vote counts for a single answer."""

    up: int
    down: int

    def __post_init__(self):
        if self.up < 0 or self.down < 0:
            raise ValueError(f"vote counts must be non-negative, got ({self.up}, {self.down})")

    @property
    def n(self) -> int:
        return self.up + self.down

    @property
    def p(self) -> float:
        """Up-vote proportion; undefined (raises) when there are no votes."""
        if self.n == 0:
            raise ValueError("proportion undefined for a tally with no votes")
        return self.up / self.n


@dataclass(frozen=True)
class Maxima:
    """Per-question vote maxima after the floor convention (all >= 1).

    ``u_max`` and ``d_max`` need not come from the same answer, so in general
    ``n_max != u_max + d_max``.
    """

    n_max: int
    u_max: int
    d_max: int

    def __post_init__(self):
        if min(self.n_max, self.u_max, self.d_max) < 1:
            raise ValueError(
                "maxima must be >= 1; raw counts go through effective_maxima() first"
            )


class SiKind(Enum):
    """Which vote aggregate the spotlight index is built from."""

    WHOLE = "whole"        # (u + d) / n_max
    NET = "net"            # (u - d) / n_max
    POSITIVE = "positive"  # u / n_max
    NEGATIVE = "negative"  # -d / n_max
    UPVOTE = "upvote"      # u / u_max
    DOWNVOTE = "downvote"  # -d / d_max


_TRANSFORM_NAMES = ("linear", "log", "exp", "poly")


@dataclass(frozen=True)
class SiTransform:
    """Monotone reshaping of a spotlight index.

    * ``linear`` - the plain ratio.
    * ``log``    - base-10 logarithm with +1 offsets, e.g. whole index
      log10(n + 1) / log10(n_max + 1); fast early growth that flattens out.
    * ``exp``    - exp(count - max); negligible until the count nears the max.
    * ``poly``   - power function (ratio ** exponent), exponent > 0; slow
      early growth that accelerates late.

    ``exponent`` is only consulted by ``poly``.
    """

    name: str
    exponent: float = 1.0

    def __post_init__(self):
        if self.name not in _TRANSFORM_NAMES:
            raise ValueError(f"unknown transform {self.name!r}, expected one of {_TRANSFORM_NAMES}")


LINEAR = SiTransform("linear")
LOG10 = SiTransform("log")
EXP = SiTransform("exp")


def poly(exponent: float) -> SiTransform:
    """Power-function transform with the given exponent (must be > 0)."""
    return SiTransform("poly", exponent)


class WholeSiVariant(Enum):
    """Denominator convention for the *linear whole* index only."""

    PLAIN = "plain"                    # n / n_max
    SHIFT_DENOM = "shift-denom"        # n / (n_max + 1)
    SHIFT_BOTH = "shift-both"          # (n + 1) / (n_max + 1)


class Bound(Enum):
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True)
class ScoringConfig:
    """Knobs of the blended score.

    ``z`` is the normal quantile controlling interval width, ``p_weight`` the
    weight of the Wilson term (1 - p_weight goes to the spotlight index).
    Ranking normally uses the lower bound; the conservative choice.
    """

    z: float = 2.0
    p_weight: float = 0.5
    si_kind: SiKind = SiKind.WHOLE
    si_transform: SiTransform = LINEAR
    bound: Bound = Bound.LOWER
    n_max_floor: int = 1
    whole_variant: WholeSiVariant = WholeSiVariant.PLAIN


@dataclass(frozen=True)
class WilsonInterval:
    lower: float
    upper: float

    def __post_init__(self):
        if not 0.0 <= self.lower <= self.upper <= 1.0:
            raise ValueError(f"malformed interval ({self.lower}, {self.upper})")

    def pick(self, bound: Bound) -> float:
        return self.lower if bound is Bound.LOWER else self.upper


@dataclass(frozen=True)
class ScoreBreakdown:
    """One answer's score with its components: combined = P*w + (1-P)*si."""

    wilson: WilsonInterval
    wilson_used: float
    si: float
    combined: float


def wilson_interval(tally: VoteTally, z: float) -> WilsonInterval:
    """Both bounds of the Wilson score interval for the up-vote proportion.

    With no votes the interval is (0, 1), total uncertainty.  With z = 0 it
    collapses to the sample proportion.  Otherwise:

        (p + z^2/2n +- z/2n * sqrt(4n*p*(1-p) + z^2)) / (1 + z^2/n)
    """
    if z < 0:
        raise ValueError("z must be non-negative")
    n = tally.n
    if n == 0:
        return WilsonInterval(0.0, 1.0)
    p = tally.up / n
    if z == 0.0:
        return WilsonInterval(p, p)
    zz = z * z
    center = p + zz / (2.0 * n)
    spread = (z / (2.0 * n)) * math.sqrt(4.0 * n * p * (1.0 - p) + zz)
    denom = 1.0 + zz / n
    # the exact roots bracket p and lie in [0, 1]; clamps shave float dust only
    lower = max(0.0, min((center - spread) / denom, p))
    upper = min(1.0, max((center + spread) / denom, p))
    return WilsonInterval(lower, upper)


def average_rating(tally: VoteTally) -> float:
    """Plain up-vote proportion; 0.0 for an unvoted answer by convention."""
    if tally.n == 0:
        return 0.0
    return tally.up / tally.n


def effective_maxima(raw_n_max: int, raw_u_max: int, raw_d_max: int, floor: int = 1) -> Maxima:
    """Apply the floor convention to raw per-question maxima.

    floor = 1 is the zero-denominator guard for brand-new questions; a larger
    floor (e.g. 10) additionally damps the early-vote bias while the question
    is young.
    """
    if floor < 1:
        raise ValueError("floor must be >= 1")
    return Maxima(max(raw_n_max, floor), max(raw_u_max, floor), max(raw_d_max, floor))


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def spotlight_index(
    tally: VoteTally,
    maxima: Maxima,
    kind: SiKind,
    transform: SiTransform = LINEAR,
    whole_variant: WholeSiVariant = WholeSiVariant.PLAIN,
) -> float:
    """Attention level of one answer relative to the question's most-voted one.

    ``maxima`` must already be floored (see :func:`effective_maxima`), which
    guarantees positive denominators.  Net indices use sgn(u-d) * f(|u-d|) so
    they are exactly 0 at u = d and odd around it under every transform.
    Exponential indices are evaluated as exp(count - max) with the subtraction
    done first; never as a quotient of two huge exponentials.
    """
    u, d = tally.up, tally.down
    n = u + d
    name = transform.name

    if name == "linear":
        if kind is SiKind.WHOLE:
            if whole_variant is WholeSiVariant.SHIFT_DENOM:
                return n / (maxima.n_max + 1)
            if whole_variant is WholeSiVariant.SHIFT_BOTH:
                return (n + 1) / (maxima.n_max + 1)
            return n / maxima.n_max
        if kind is SiKind.NET:
            return (u - d) / maxima.n_max
        if kind is SiKind.POSITIVE:
            return u / maxima.n_max
        if kind is SiKind.NEGATIVE:
            return -(d / maxima.n_max)
        if kind is SiKind.UPVOTE:
            return u / maxima.u_max
        return -(d / maxima.d_max)

    if name == "log":
        log_nmax = math.log10(maxima.n_max + 1)
        if kind is SiKind.WHOLE:
            return math.log10(n + 1) / log_nmax
        if kind is SiKind.NET:
            diff = u - d
            return _sign(diff) * math.log10(abs(diff) + 1) / log_nmax
        if kind is SiKind.POSITIVE:
            return math.log10(u + 1) / log_nmax
        if kind is SiKind.NEGATIVE:
            return -(math.log10(d + 1) / log_nmax)
        if kind is SiKind.UPVOTE:
            return math.log10(u + 1) / math.log10(maxima.u_max + 1)
        return -(math.log10(d + 1) / math.log10(maxima.d_max + 1))

    if name == "exp":
        if kind is SiKind.WHOLE:
            return math.exp(n - maxima.n_max)
        if kind is SiKind.NET:
            return math.exp(u - d - maxima.n_max)
        if kind is SiKind.POSITIVE:
            return math.exp(u - maxima.n_max)
        if kind is SiKind.NEGATIVE:
            return -math.exp(d - maxima.n_max)
        if kind is SiKind.UPVOTE:
            return math.exp(u - maxima.u_max)
        return -math.exp(d - maxima.d_max)

    # poly: take the ratio first so large counts cannot overflow
    a = transform.exponent
    if kind is SiKind.WHOLE:
        return (n / maxima.n_max) ** a
    if kind is SiKind.NET:
        diff = u - d
        return _sign(diff) * (abs(diff) / maxima.n_max) ** a
    if kind is SiKind.POSITIVE:
        return (u / maxima.n_max) ** a
    if kind is SiKind.NEGATIVE:
        return -((d / maxima.n_max) ** a)
    if kind is SiKind.UPVOTE:
        return (u / maxima.u_max) ** a
    return -((d / maxima.d_max) ** a)


def si_range(kind: SiKind, transform: SiTransform = LINEAR) -> tuple[float, float]:
    """Theoretical attainable range of the index (closure; transform-independent).

    Every transform maps the linear index monotonically onto the same range;
    the exponential variants reach the endpoints only in the limit.
    """
    if kind in (SiKind.WHOLE, SiKind.POSITIVE, SiKind.UPVOTE):
        return (0.0, 1.0)
    if kind is SiKind.NET:
        return (-1.0, 1.0)
    return (-1.0, 0.0)


def combined_range(kind: SiKind, p_weight: float) -> tuple[float, float]:
    """Attainable range of the blended score for a given kind and weight."""
    si_lo, si_hi = si_range(kind)
    return (p_weight * 0.0 + (1.0 - p_weight) * si_lo, p_weight * 1.0 + (1.0 - p_weight) * si_hi)


def combined_score(tally: VoteTally, maxima: Maxima, config: ScoringConfig) -> ScoreBreakdown:
    """Blend the configured Wilson bound with the spotlight index.

    The blend is the exact affine combination; negative results are meaningful
    (an answer judged worse than an unrated one) and are never clamped.
    """
    interval = wilson_interval(tally, config.z)
    used = interval.pick(config.bound)
    si = spotlight_index(tally, maxima, config.si_kind, config.si_transform, config.whole_variant)
    combined = config.p_weight * used + (1.0 - config.p_weight) * si
    return ScoreBreakdown(interval, used, si, combined)


def validate_config(config: ScoringConfig) -> ScoringConfig:
    """Check every config invariant; returns the config unchanged if valid."""
    if not (math.isfinite(config.p_weight) and 0.0 <= config.p_weight <= 1.0):
        raise ConfigError("p_weight", f"must be in [0, 1], got {config.p_weight}")
    if not (math.isfinite(config.z) and config.z >= 0.0):
        raise ConfigError("z", f"must be a non-negative real, got {config.z}")
    if config.si_transform.name == "poly" and not (
        math.isfinite(config.si_transform.exponent) and config.si_transform.exponent > 0.0
    ):
        raise ConfigError(
            "si_transform.exponent",
            f"poly transform needs a positive exponent, got {config.si_transform.exponent}",
        )
    if config.n_max_floor < 1:
        raise ConfigError("n_max_floor", f"must be >= 1, got {config.n_max_floor}")
    return config
