"""Dense score grids over (u, d) and parameter sweeps, emitted as CSV.

The grids are the numeric surfaces behind contour plots of the scoring rules:
cell (i, j) holds the score at u = i*step, d = j*step under one fixed maxima
snapshot.  Evaluation is vectorized with numpy (a full 1001x1001 grid is ~1e6
cells) but must agree with the scalar functions in :mod:`spotrank.scoring`;
the test suite cross-checks the two paths cell by cell.

Output is data, not images: long-format CSV with a ``u,d,score`` header and
``#`` metadata comments, consumable by any plotting tool.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator, TextIO, Union

import numpy as np

from .scoring import (
    Bound,
    Maxima,
    ScoringConfig,
    SiKind,
    SiTransform,
    WholeSiVariant,
    validate_config,
)


class InconsistentMaximaError(ValueError):
    """The fixed maxima cannot cover every grid cell for the chosen kind."""


@dataclass(frozen=True)
class WilsonScorer:
    """Original Wilson interval bound, no spotlight term."""

    z: float
    bound: Bound = Bound.LOWER

    def __post_init__(self):
        if self.z < 0:
            raise ValueError("z must be non-negative")


@dataclass(frozen=True)
class AverageRatingScorer:
    """Plain up-vote proportion baseline (0 for unvoted cells)."""


@dataclass(frozen=True)
class ImprovedScorer:
    """The blended score under a full :class:`ScoringConfig`."""

    config: ScoringConfig


Scorer = Union[WilsonScorer, AverageRatingScorer, ImprovedScorer]


@dataclass(frozen=True)
class GridSpec:
    """Axes, fixed maxima and scorer for one grid.

    ``u_max_grid``/``d_max_grid`` are inclusive axis tops; cells are every
    ``step`` votes.  ``maxima`` must cover the whole grid for the scorer's
    kind (checked by :func:`grid_scores`).
    """

    u_max_grid: int
    d_max_grid: int
    maxima: Maxima
    scorer: Scorer
    step: int = 1

    def __post_init__(self):
        if self.u_max_grid < 0 or self.d_max_grid < 0:
            raise ValueError("axis bounds must be non-negative")
        if self.step < 1:
            raise ValueError("step must be >= 1")


@dataclass(frozen=True, eq=False)
class ScoreGrid:
    """Row-major score matrix: ``scores[i, j]`` is the cell at (u_values[i], d_values[j])."""

    u_values: np.ndarray
    d_values: np.ndarray
    scores: np.ndarray
    metadata: dict[str, str]


@dataclass(frozen=True)
class SweepPoint:
    z: float
    p_weight: float
    kind: SiKind
    transform: SiTransform

    def slug(self) -> str:
        """Deterministic filename fragment, e.g. ``z2_p0.5_whole_linear``."""
        t = self.transform.name
        if t == "poly":
            t += format(self.transform.exponent, "g")
        return f"z{self.z:g}_p{self.p_weight:g}_{self.kind.value}_{t}"


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian sweep over z, p_weight, kind and transform on one base grid."""

    base: GridSpec
    z_values: tuple[float, ...]
    p_values: tuple[float, ...]
    kinds: tuple[SiKind, ...]
    transforms: tuple[SiTransform, ...]

    def __post_init__(self):
        if not isinstance(self.base.scorer, ImprovedScorer):
            raise ValueError("sweep varies blended-score parameters; base scorer must be ImprovedScorer")
        for name in ("z_values", "p_values", "kinds", "transforms"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"{name} must be non-empty")


def _check_coverage(spec: GridSpec) -> None:
    if not isinstance(spec.scorer, ImprovedScorer):
        return
    kind = spec.scorer.config.si_kind
    m = spec.maxima
    if kind in (SiKind.WHOLE, SiKind.NET, SiKind.POSITIVE, SiKind.NEGATIVE):
        needed = spec.u_max_grid + spec.d_max_grid
        if m.n_max < needed:
            raise InconsistentMaximaError(
                f"n_max={m.n_max} cannot cover u+d up to {needed} for kind {kind.value}"
            )
    elif kind is SiKind.UPVOTE:
        if m.u_max < spec.u_max_grid:
            raise InconsistentMaximaError(
                f"u_max={m.u_max} cannot cover u up to {spec.u_max_grid} for kind upvote"
            )
    else:  # DOWNVOTE
        if m.d_max < spec.d_max_grid:
            raise InconsistentMaximaError(
                f"d_max={m.d_max} cannot cover d up to {spec.d_max_grid} for kind downvote"
            )


def _average_grid(U: np.ndarray, D: np.ndarray) -> np.ndarray:
    N = U + D
    positive = N > 0
    safe_n = np.where(positive, N, 1.0)
    return np.where(positive, U / safe_n, 0.0)


def _wilson_bound_grid(U: np.ndarray, D: np.ndarray, z: float, bound: Bound) -> np.ndarray:
    # mirrors scoring.wilson_interval operation for operation so the two paths agree
    N = U + D
    positive = N > 0
    safe_n = np.where(positive, N, 1.0)
    p = np.where(positive, U / safe_n, 0.0)
    if z == 0.0:
        return np.where(positive, p, 0.0 if bound is Bound.LOWER else 1.0)
    zz = z * z
    center = p + zz / (2.0 * safe_n)
    spread = (z / (2.0 * safe_n)) * np.sqrt(4.0 * safe_n * p * (1.0 - p) + zz)
    denom = 1.0 + zz / safe_n
    if bound is Bound.LOWER:
        values = np.maximum(0.0, np.minimum((center - spread) / denom, p))
        return np.where(positive, values, 0.0)
    values = np.minimum(1.0, np.maximum((center + spread) / denom, p))
    return np.where(positive, values, 1.0)


def _si_grid(
    U: np.ndarray,
    D: np.ndarray,
    maxima: Maxima,
    kind: SiKind,
    transform: SiTransform,
    whole_variant: WholeSiVariant,
) -> np.ndarray:
    N = U + D
    name = transform.name

    if name == "linear":
        if kind is SiKind.WHOLE:
            if whole_variant is WholeSiVariant.SHIFT_DENOM:
                return N / (maxima.n_max + 1)
            if whole_variant is WholeSiVariant.SHIFT_BOTH:
                return (N + 1) / (maxima.n_max + 1)
            return N / maxima.n_max
        if kind is SiKind.NET:
            return (U - D) / maxima.n_max
        if kind is SiKind.POSITIVE:
            return (U / maxima.n_max) + np.zeros_like(D)
        if kind is SiKind.NEGATIVE:
            return -(D / maxima.n_max) + np.zeros_like(U)
        if kind is SiKind.UPVOTE:
            return (U / maxima.u_max) + np.zeros_like(D)
        return -(D / maxima.d_max) + np.zeros_like(U)

    if name == "log":
        log_nmax = math.log10(maxima.n_max + 1)
        if kind is SiKind.WHOLE:
            return np.log10(N + 1) / log_nmax
        if kind is SiKind.NET:
            diff = U - D
            return np.sign(diff) * np.log10(np.abs(diff) + 1) / log_nmax
        if kind is SiKind.POSITIVE:
            return np.log10(U + 1) / log_nmax + np.zeros_like(D)
        if kind is SiKind.NEGATIVE:
            return -(np.log10(D + 1) / log_nmax) + np.zeros_like(U)
        if kind is SiKind.UPVOTE:
            return np.log10(U + 1) / math.log10(maxima.u_max + 1) + np.zeros_like(D)
        return -(np.log10(D + 1) / math.log10(maxima.d_max + 1)) + np.zeros_like(U)

    if name == "exp":
        if kind is SiKind.WHOLE:
            return np.exp(N - maxima.n_max)
        if kind is SiKind.NET:
            return np.exp(U - D - maxima.n_max)
        if kind is SiKind.POSITIVE:
            return np.exp(U - maxima.n_max) + np.zeros_like(D)
        if kind is SiKind.NEGATIVE:
            return -np.exp(D - maxima.n_max) + np.zeros_like(U)
        if kind is SiKind.UPVOTE:
            return np.exp(U - maxima.u_max) + np.zeros_like(D)
        return -np.exp(D - maxima.d_max) + np.zeros_like(U)

    a = transform.exponent
    if kind is SiKind.WHOLE:
        return (N / maxima.n_max) ** a
    if kind is SiKind.NET:
        diff = U - D
        return np.sign(diff) * (np.abs(diff) / maxima.n_max) ** a
    if kind is SiKind.POSITIVE:
        return (U / maxima.n_max) ** a + np.zeros_like(D)
    if kind is SiKind.NEGATIVE:
        return -((D / maxima.n_max) ** a) + np.zeros_like(U)
    if kind is SiKind.UPVOTE:
        return (U / maxima.u_max) ** a + np.zeros_like(D)
    return -((D / maxima.d_max) ** a) + np.zeros_like(U)


def _metadata(spec: GridSpec) -> dict[str, str]:
    scorer = spec.scorer
    meta: dict[str, str] = {}
    if isinstance(scorer, AverageRatingScorer):
        meta["scorer"] = "average"
    elif isinstance(scorer, WilsonScorer):
        meta["scorer"] = "wilson"
        meta["z"] = format(scorer.z, ".12g")
        meta["bound"] = scorer.bound.value
    else:
        config = scorer.config
        meta["scorer"] = "improved"
        meta["z"] = format(config.z, ".12g")
        meta["p_weight"] = format(config.p_weight, ".12g")
        meta["kind"] = config.si_kind.value
        meta["transform"] = config.si_transform.name
        if config.si_transform.name == "poly":
            meta["poly_a"] = format(config.si_transform.exponent, ".12g")
        if config.whole_variant is not WholeSiVariant.PLAIN:
            meta["whole_variant"] = config.whole_variant.value
        meta["bound"] = config.bound.value
    meta["n_max"] = str(spec.maxima.n_max)
    meta["u_max"] = str(spec.maxima.u_max)
    meta["d_max"] = str(spec.maxima.d_max)
    meta["step"] = str(spec.step)
    return meta


def grid_scores(spec: GridSpec) -> ScoreGrid:
    """Evaluate the scorer over every (u, d) cell of the spec."""
    _check_coverage(spec)
    u_values = np.arange(0, spec.u_max_grid + 1, spec.step, dtype=np.int64)
    d_values = np.arange(0, spec.d_max_grid + 1, spec.step, dtype=np.int64)
    U = u_values.astype(np.float64)[:, None]
    D = d_values.astype(np.float64)[None, :]

    scorer = spec.scorer
    if isinstance(scorer, AverageRatingScorer):
        scores = _average_grid(U, D)
    elif isinstance(scorer, WilsonScorer):
        scores = _wilson_bound_grid(U, D, scorer.z, scorer.bound)
    else:
        config = validate_config(scorer.config)
        w = _wilson_bound_grid(U, D, config.z, config.bound)
        si = _si_grid(U, D, spec.maxima, config.si_kind, config.si_transform, config.whole_variant)
        scores = config.p_weight * w + (1.0 - config.p_weight) * si
    return ScoreGrid(u_values, d_values, scores, _metadata(spec))


def sweep(spec: SweepSpec) -> Iterator[tuple[SweepPoint, ScoreGrid]]:
    """One grid per parameter tuple, in z-outer, then P, kind, transform order."""
    base = spec.base
    base_config = base.scorer.config  # type: ignore[union-attr]
    for z in spec.z_values:
        for p_weight in spec.p_values:
            for kind in spec.kinds:
                for transform in spec.transforms:
                    point = SweepPoint(z, p_weight, kind, transform)
                    config = replace(
                        base_config, z=z, p_weight=p_weight, si_kind=kind, si_transform=transform
                    )
                    try:
                        yield point, grid_scores(replace(base, scorer=ImprovedScorer(config)))
                    except ValueError as exc:
                        raise type(exc)(f"sweep point {point.slug()}: {exc}") from exc


def emit_csv(grid: ScoreGrid, destination: Union[str, Path, TextIO]) -> None:
    """Write the grid as long-format CSV: ``#`` metadata, ``u,d,score`` header.

    Rows are u-major then d; scores carry 12 significant digits, which
    round-trips doubles at these magnitudes.  LF endings, UTF-8.
    """
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            _write_csv(grid, fh)
    else:
        _write_csv(grid, destination)


def _write_csv(grid: ScoreGrid, fh: TextIO) -> None:
    for key, value in grid.metadata.items():
        fh.write(f"# {key}: {value}\n")
    fh.write("u,d,score\n")
    d_list = grid.d_values.tolist()
    for i, u in enumerate(grid.u_values.tolist()):
        row = grid.scores[i].tolist()
        fh.write("\n".join(f"{u},{d},{s:.12g}" for d, s in zip(d_list, row)))
        fh.write("\n")


def load_csv(source: Union[str, Path, TextIO]) -> ScoreGrid:
    """Read a grid written by :func:`emit_csv` back into memory."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return _read_csv(fh)
    return _read_csv(source)


def _read_csv(fh: TextIO) -> ScoreGrid:
    metadata: dict[str, str] = {}
    rows: list[tuple[int, int, float]] = []
    header_seen = False
    for line in fh:
        line = line.rstrip("\n")
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            metadata[key.strip()] = value.strip()
            continue
        if not header_seen:
            if line != "u,d,score":
                raise ValueError(f"unexpected header line {line!r}")
            header_seen = True
            continue
        u_text, d_text, s_text = line.split(",")
        rows.append((int(u_text), int(d_text), float(s_text)))
    if not header_seen:
        raise ValueError("missing u,d,score header")
    u_values = np.array(sorted({u for u, _, _ in rows}), dtype=np.int64)
    d_values = np.array(sorted({d for _, d, _ in rows}), dtype=np.int64)
    scores = np.empty((len(u_values), len(d_values)), dtype=np.float64)
    u_index = {int(u): i for i, u in enumerate(u_values)}
    d_index = {int(d): j for j, d in enumerate(d_values)}
    for u, d, s in rows:
        scores[u_index[u], d_index[d]] = s
    return ScoreGrid(u_values, d_values, scores, metadata)
