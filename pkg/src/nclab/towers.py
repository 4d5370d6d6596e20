"""Dyadic square-root towers over a base unitary and the embedding of
compactly supported line functions through them.

A tower is a sequence u_0, u_1, ..., u_L with u_k**2 = u_{k-1}.  A function
f supported in [-2**n, 2**n] embeds at any level >= n by evaluating
g(e^{i a}) = f(2**level * a / pi) on that level's unitary; with principal
branches the result is independent of the level, and a flipped branch
breaks that independence by a visible amount.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import (
    SpectralDecomposition,
    apply_circle_function,
    as_operator,
    operator_norm,
    require_unitary,
    spectral_decompose,
)
from .roots import TOL_ROOT, BranchFunction, nth_root_branch

TOL_EMBED = 1e-9
MAX_TOWER_DEPTH = 48  # angle resolution is exhausted near double precision


@dataclass
class CompactFunction:
    """Piecewise-linear complex function on the line with compact support.

    Linear between ``breakpoints``, zero outside them; the support must be
    contained in [-2**support_exponent, 2**support_exponent] and the
    function must vanish at the support boundary so the zero extension is
    continuous.
    """

    support_exponent: int
    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.support_exponent < 0:
            raise ValueError("support exponent must be nonnegative")
        self.breakpoints = np.asarray(self.breakpoints, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.breakpoints.ndim != 1 or self.breakpoints.shape != self.values.shape:
            raise ValueError("breakpoints and values must be 1-d arrays of equal length")
        if len(self.breakpoints) < 1:
            raise ValueError("need at least one breakpoint")
        if not np.all(np.diff(self.breakpoints) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        if not (np.all(np.isfinite(self.breakpoints)) and np.all(np.isfinite(self.values))):
            raise ValueError("breakpoints and values must be finite")
        bound = 2.0 ** self.support_exponent
        if self.values[0] != 0 or self.values[-1] != 0:
            raise ValueError("function must vanish at its first and last breakpoints")
        outside = np.abs(self.breakpoints) > bound
        if np.any(self.values[outside] != 0):
            raise ValueError("values beyond the declared support bound must be zero")
        if abs(self(bound)) != 0 or abs(self(-bound)) != 0:
            raise ValueError("function must vanish at the support boundary")

    def __call__(self, x):
        return np.interp(x, self.breakpoints, self.values, left=0.0, right=0.0)

    @classmethod
    def zero(cls, support_exponent: int = 0) -> "CompactFunction":
        return cls(support_exponent, np.array([0.0]), np.array([0.0 + 0j]))

    @classmethod
    def hat(
        cls,
        center: float = 0.0,
        half_width: float = 1.0,
        height: complex = 1.0,
        support_exponent: int | None = None,
    ) -> "CompactFunction":
        """Triangular bump: ``height`` at ``center``, zero beyond ``half_width``."""
        if half_width <= 0:
            raise ValueError("half-width must be positive")
        reach = abs(center) + half_width
        if support_exponent is None:
            support_exponent = max(0, int(np.ceil(np.log2(reach))))
        if reach > 2.0 ** support_exponent:
            raise ValueError("hat exceeds the declared support bound")
        bps = np.array([center - half_width, center, center + half_width])
        vals = np.array([0.0, height, 0.0], dtype=complex)
        return cls(support_exponent, bps, vals)

    def scaled(self, factor: complex) -> "CompactFunction":
        return CompactFunction(self.support_exponent, self.breakpoints, factor * self.values)

    def add(self, other: "CompactFunction") -> "CompactFunction":
        """Pointwise sum, sampled on the merged breakpoints."""
        bps = np.union1d(self.breakpoints, other.breakpoints)
        return CompactFunction(
            max(self.support_exponent, other.support_exponent), bps, self(bps) + other(bps)
        )

    def multiply(self, other: "CompactFunction") -> "CompactFunction":
        """Pointwise product, re-sampled on merged breakpoints plus midpoints.

        The true product is piecewise-quadratic; the midpoint refinement
        keeps the piecewise-linear resampling within desk-scale tolerances
        at the sample grid.
        """
        merged = np.union1d(self.breakpoints, other.breakpoints)
        mids = 0.5 * (merged[:-1] + merged[1:])
        bps = np.union1d(merged, mids)
        return CompactFunction(
            max(self.support_exponent, other.support_exponent), bps, self(bps) * other(bps)
        )

    def sup_norm(self) -> float:
        # |affine segment| is convex, so the maximum sits at a breakpoint.
        return float(np.max(np.abs(self.values)))

    def to_json(self) -> dict:
        return {
            "support_exponent": self.support_exponent,
            "breakpoints": [float(b) for b in self.breakpoints],
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CompactFunction":
        values = np.array([complex(re, im) for re, im in data["values"]])
        return cls(int(data["support_exponent"]), np.asarray(data["breakpoints"], float), values)


@dataclass
class RootTower:
    """Square-root tower u_0, u_1, ..., u_L with u_k**2 = u_{k-1}.

    ``unitaries[k]`` is level k (level 0 is the base); ``residuals[k-1]``
    records ||u_k**2 - u_{k-1}||.  Spectral decompositions are cached per
    level for the embedding machinery.
    """

    unitaries: list[np.ndarray]
    branches: list[BranchFunction]
    residuals: list[float]
    _decompositions: dict[int, SpectralDecomposition] = field(default_factory=dict, repr=False)

    @property
    def depth(self) -> int:
        return len(self.unitaries) - 1

    @property
    def dim(self) -> int:
        return self.unitaries[0].shape[0]

    def level(self, k: int) -> np.ndarray:
        if not 0 <= k <= self.depth:
            raise ValueError(f"level {k} outside 0..{self.depth}")
        return self.unitaries[k]

    def decomposition(self, k: int) -> SpectralDecomposition:
        if k not in self._decompositions:
            self._decompositions[k] = spectral_decompose(self.level(k))
        return self._decompositions[k]


def build_tower(
    u,
    depth: int,
    branches: BranchFunction | list[BranchFunction],
    tol_root: float = TOL_ROOT,
) -> RootTower:
    """Iterate branch square roots ``depth`` times above the base unitary.

    ``branches`` is one square-root branch reused at every level or a list
    of length ``depth``; each level is checked to square back onto the one
    below within ``tol_root``.
    """
    u = require_unitary(u)
    if depth < 1:
        raise ValueError("tower depth must be at least 1")
    if depth > MAX_TOWER_DEPTH:
        raise ValueError(f"tower depth {depth} exceeds the supported {MAX_TOWER_DEPTH}")
    if isinstance(branches, BranchFunction):
        branches = [branches] * depth
    branches = list(branches)
    if len(branches) != depth:
        raise ValueError(f"need {depth} branches, got {len(branches)}")
    for b in branches:
        if b.n != 2:
            raise ValueError("tower branches must be square-root branches (order 2)")
    levels = [u]
    residuals = []
    for b in branches:
        nxt = nth_root_branch(levels[-1], b)
        residual = operator_norm(nxt @ nxt - levels[-1])
        if residual > tol_root:
            raise ArithmeticError(f"tower squaring residual {residual:.3e} exceeds {tol_root:.3e}")
        levels.append(nxt)
        residuals.append(residual)
    return RootTower(unitaries=levels, branches=branches, residuals=residuals)


def embed_compact_function(tower: RootTower, f: CompactFunction, level: int) -> np.ndarray:
    """Embed a compactly supported line function at a tower level.

    Evaluates g(e^{i a}) = f(2**level * a / pi) on the level unitary, the
    composite of rescaling the support into [-1, 1], wrapping [-1, 1] onto
    the circle, and functional calculus.
    """
    if f.support_exponent > level:
        raise ValueError(
            f"support exceeds tower depth: support exponent {f.support_exponent} "
            f"needs level >= {f.support_exponent}, got {level}"
        )
    dec = tower.decomposition(level)
    scale = 2.0 ** level / np.pi
    return apply_circle_function(dec, lambda a: complex(f(scale * a)))


def level_independence_residual(
    tower: RootTower, f: CompactFunction, level_a: int, level_b: int
) -> float:
    """||embed(f, level_a) - embed(f, level_b)|| across two valid levels."""
    return operator_norm(
        embed_compact_function(tower, f, level_a) - embed_compact_function(tower, f, level_b)
    )


def multiplier_membership_check(base_words, cover_ops, span) -> list[dict]:
    """Products of base elements with covering elements, tested against a span.

    For every pair (b, c) reports the span-membership residuals of b @ c and
    c @ b; small residuals mean the base algebra multiplies the covering
    span into itself.
    """
    from .spans import membership_residual

    base_words = [as_operator(b) for b in base_words]
    cover_ops = [as_operator(c) for c in cover_ops]
    for x in base_words + cover_ops:
        if x.shape[0] != span.dim:
            raise ValueError(f"dimension mismatch: {x.shape[0]} vs span dim {span.dim}")
    report = []
    for i, b in enumerate(base_words):
        for j, c in enumerate(cover_ops):
            report.append(
                {
                    "base_index": i,
                    "cover_index": j,
                    "left_residual": membership_residual(span, b @ c),
                    "right_residual": membership_residual(span, c @ b),
                }
            )
    return report
