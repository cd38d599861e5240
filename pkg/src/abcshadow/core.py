"""Shared domain types: observation windows, point patterns, box priors, RNG streams.

Parameter vectors are plain 1-D float arrays throughout the package; the types
below carry everything else the samplers need (geometry of the observation
window, marks, prior support, reproducible random streams).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DomainError",
    "Window",
    "MarkedPoint",
    "PointPattern",
    "BoxPrior",
    "RngState",
    "as_generator",
    "box_ball_propose",
    "prior_density",
]


class DomainError(ValueError):
    """A parameter vector left the domain where the model density is defined."""


@dataclass(frozen=True)
class Window:
    """Axis-aligned observation window [lower[0], upper[0]] x ... in R^d."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("window bounds must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("window bounds must be finite")
        if not np.all(lower < upper):
            raise ValueError("window must have positive extent on every axis")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def sides(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def volume(self) -> float:
        return float(np.prod(self.sides))

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Vectorized membership test for an (n, d) array of locations."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all((pts >= self.lower) & (pts <= self.upper), axis=1)


@dataclass(frozen=True)
class MarkedPoint:
    """One point of a pattern; ``mark`` is None for unmarked processes."""

    location: np.ndarray
    mark: float | None = None


@dataclass
class PointPattern:
    """A finite point configuration in a window, array-backed.

    Parameters
    ----------
    points : (n, d) float array of locations.
    window : the observation window the pattern lives in.
    marks : optional (n,) float array (segment orientations in [0, pi) for
        the candy model); None for unmarked patterns.
    """

    points: np.ndarray
    window: Window
    marks: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size == 0:
            pts = pts.reshape(0, self.window.dim)
        if pts.ndim != 2 or pts.shape[1] != self.window.dim:
            raise ValueError("points must be an (n, d) array matching the window dimension")
        self.points = pts
        if self.marks is not None:
            marks = np.asarray(self.marks, dtype=float)
            if marks.shape != (pts.shape[0],):
                raise ValueError("marks must be a 1-D array with one entry per point")
            self.marks = marks
        inside = self.window.contains(pts) if len(pts) else np.ones(0, dtype=bool)
        if not np.all(inside):
            bad = np.flatnonzero(~inside)
            raise ValueError(f"points outside the window at rows {bad.tolist()}")

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        for i in range(len(self)):
            yield self.point(i)

    def point(self, i: int) -> MarkedPoint:
        mark = None if self.marks is None else float(self.marks[i])
        return MarkedPoint(self.points[i].copy(), mark)

    @staticmethod
    def empty(window: Window, marked: bool = False) -> "PointPattern":
        pts = np.zeros((0, window.dim))
        marks = np.zeros(0) if marked else None
        return PointPattern(pts, window, marks)


@dataclass(frozen=True)
class BoxPrior:
    """Uniform prior on an axis-aligned box in parameter space."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("prior bounds must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("prior bounds must be finite")
        if not np.all(lower < upper):
            raise ValueError("prior box must have lower < upper componentwise")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def volume(self) -> float:
        return float(np.prod(self.upper - self.lower))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def contains(self, theta: np.ndarray):
        """True where theta lies in the box, boundary included.

        Accepts one parameter vector or a stack with one row per vector; a
        stack comes back as a boolean array.
        """
        theta = np.asarray(theta, dtype=float)
        if theta.ndim not in (1, 2) or theta.shape[-1] != self.dim:
            raise ValueError("parameter dimension does not match the prior box")
        inside = np.all((theta >= self.lower) & (theta <= self.upper), axis=-1)
        return bool(inside) if theta.ndim == 1 else inside

    def sample(self, rng, size: int | None = None) -> np.ndarray:
        gen = as_generator(rng)
        if size is None:
            return gen.uniform(self.lower, self.upper)
        return gen.uniform(self.lower, self.upper, size=(size, self.dim))


@dataclass(frozen=True)
class RngState:
    """Seeded, named random stream.

    Built on the counter-based Philox generator: equal (seed, stream) pairs
    give bit-identical draws, distinct stream ids give independent streams,
    so parallel replicates just use consecutive streams of one seed.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.Philox(seq))

    def split(self, n: int) -> list["RngState"]:
        """n fresh streams derived from this one (stream ids offset by 1..n)."""
        base = self.stream + 1
        return [RngState(self.seed, base + i) for i in range(n)]


def as_generator(rng) -> np.random.Generator:
    """Coerce an RngState, an int seed, or a Generator to a Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngState):
        return rng.generator()
    if isinstance(rng, (int, np.integer)):
        return RngState(int(rng)).generator()
    raise TypeError(f"cannot build a random generator from {type(rng).__name__}")


def box_ball_propose(center: np.ndarray, delta: np.ndarray, rng) -> np.ndarray:
    """Uniform draw from the box of full widths ``delta`` centred at ``center``.

    Each coordinate is drawn independently on
    [center[i] - delta[i]/2, center[i] + delta[i]/2]. This is the
    componentwise realization of the ball b(center, delta/2) used by every
    proposal in the package.
    """
    center = np.asarray(center, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if center.ndim != 1 or center.shape != delta.shape:
        raise ValueError("center and delta must be 1-D arrays of equal length")
    if not np.all(np.isfinite(center)):
        raise ValueError("center must be finite")
    if not np.all(delta > 0):
        raise ValueError("delta must be positive componentwise")
    gen = as_generator(rng)
    return center + delta * (gen.random(center.size) - 0.5)


def prior_density(prior: BoxPrior, theta: np.ndarray) -> float:
    """Uniform box prior density: 1/volume inside the box, 0 outside."""
    return 1.0 / prior.volume if prior.contains(theta) else 0.0
