"""Clock-and-shift representations of the rational noncommutative torus,
the covering-generator products built from square-root towers over both
generators, and the parameter-halving tower that drives the noncommutativity
to zero.

Only rational angles theta = p/q are represented: they admit faithful
q-dimensional clock/shift models, while irrational angles have no
finite-dimensional faithful representation at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .operators import as_operator, operator_norm
from .towers import CompactFunction, RootTower, embed_compact_function

TOL_TORUS = 1e-10


@dataclass(frozen=True)
class TorusParams:
    """Reduced rational rotation parameter theta = p/q with q >= 1."""

    p: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("denominator q must be at least 1")
        g = gcd(abs(self.p), self.q)
        if g > 1:
            object.__setattr__(self, "p", self.p // g)
            object.__setattr__(self, "q", self.q // g)

    @property
    def theta(self) -> float:
        return self.p / self.q

    def halved(self) -> "TorusParams":
        return TorusParams(self.p, 2 * self.q)

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q}

    @classmethod
    def from_json(cls, data: dict) -> "TorusParams":
        return cls(int(data["p"]), int(data["q"]))


@dataclass
class TorusRep:
    """Clock/shift pair satisfying U V = e^{2 pi i p/q} V U with U^q = V^q = I."""

    params: TorusParams
    U: np.ndarray
    V: np.ndarray
    commutation_residual: float
    clock_order_residual: float
    shift_order_residual: float


def clock_matrix(p: int, q: int) -> np.ndarray:
    """diag(1, w, w^2, ...) with w = e^{2 pi i p/q}."""
    omega = np.exp(2j * np.pi * p / q)
    return np.diag(omega ** np.arange(q)).astype(complex)


def shift_matrix(q: int) -> np.ndarray:
    """Cyclic shift e_j -> e_{j+1 mod q}."""
    return np.roll(np.eye(q, dtype=complex), 1, axis=0)


def commutation_residual(a, b, theta: float) -> float:
    """||a b - e^{2 pi i theta} b a||."""
    a = as_operator(a)
    b = as_operator(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return operator_norm(a @ b - np.exp(2j * np.pi * theta) * b @ a)


def clock_shift(params: TorusParams, tol: float = TOL_TORUS) -> TorusRep:
    """The standard q-dimensional clock/shift representation of theta = p/q."""
    q = params.q
    U = clock_matrix(params.p, q)
    V = shift_matrix(q)
    eye = np.eye(q)
    rep = TorusRep(
        params=params,
        U=U,
        V=V,
        commutation_residual=commutation_residual(U, V, params.theta),
        clock_order_residual=operator_norm(np.linalg.matrix_power(U, q) - eye),
        shift_order_residual=operator_norm(np.linalg.matrix_power(V, q) - eye),
    )
    worst = max(rep.commutation_residual, rep.clock_order_residual, rep.shift_order_residual)
    if worst > tol:
        raise ArithmeticError(f"clock/shift relations violated: residual {worst:.3e}")
    return rep


def covering_generator_products(
    clock_tower: RootTower,
    shift_tower: RootTower,
    f1: CompactFunction,
    f2: CompactFunction,
    level: int,
) -> tuple[np.ndarray, np.ndarray]:
    """The two mixed products of embedded functions over both generator towers.

    Returns (i_U(f1) @ i_V(f2), i_V(f1) @ i_U(f2)) at the given level; these
    generate the covering algebra of the torus and generically differ when
    the generators do not commute.
    """
    if clock_tower.dim != shift_tower.dim:
        raise ValueError(
            f"towers act on different dimensions: {clock_tower.dim} vs {shift_tower.dim}"
        )
    a1 = embed_compact_function(clock_tower, f1, level)
    a2 = embed_compact_function(shift_tower, f2, level)
    b1 = embed_compact_function(shift_tower, f1, level)
    b2 = embed_compact_function(clock_tower, f2, level)
    return a1 @ a2, b1 @ b2


@dataclass
class AnticommutingWitness:
    """Minimal exhibit of a square root that anticommutes with a generator."""

    u: np.ndarray
    u1: np.ndarray
    v: np.ndarray
    square_residual: float
    anticommute_residual: float


def anticommuting_root_example() -> AnticommutingWitness:
    """u = I, u1 = the exchange matrix, v = diag(1, -1).

    u1 squares to u exactly while anticommuting with v exactly, so this root
    of the identity generates a noncommutative covering algebra; the
    principal root (the identity itself) commutes instead.  All arithmetic
    is exact on integer matrices.
    """
    u = np.eye(2, dtype=complex)
    u1 = np.array([[0, 1], [1, 0]], dtype=complex)
    v = np.array([[1, 0], [0, -1]], dtype=complex)
    return AnticommutingWitness(
        u=u,
        u1=u1,
        v=v,
        square_residual=operator_norm(u1 @ u1 - u),
        anticommute_residual=operator_norm(u1 @ v + v @ u1),
    )


@dataclass
class ThetaHalvingReport:
    """Residuals of one parameter-halving step theta -> theta/2.

    The target representation at (p, 2q) supplies (u', v'); the image pair
    ((u')**2, v') must satisfy the source relation, and both image
    generators must have the source orders.
    """

    source: TorusParams
    target: TorusParams
    source_dim: int
    target_dim: int
    target_relation_residual: float
    image_relation_residual: float
    image_clock_order_residual: float
    image_shift_order_residual: float


def theta_halving_embedding(
    params: TorusParams, max_dim: int = 128, tol: float = TOL_TORUS
) -> ThetaHalvingReport:
    """One step of the halving tower: represent theta/2 and check that the
    squared clock with the same shift reproduces the theta relations."""
    target = params.halved()
    if target.q > max_dim:
        raise ValueError(f"target dimension {target.q} exceeds the configured maximum {max_dim}")
    source_rep = clock_shift(params, tol=tol)
    target_rep = clock_shift(target, tol=tol)
    u2 = target_rep.U @ target_rep.U
    eye = np.eye(target.q)
    return ThetaHalvingReport(
        source=params,
        target=target,
        source_dim=source_rep.U.shape[0],
        target_dim=target_rep.U.shape[0],
        target_relation_residual=commutation_residual(target_rep.U, target_rep.V, target.theta),
        image_relation_residual=commutation_residual(u2, target_rep.V, params.theta),
        image_clock_order_residual=operator_norm(np.linalg.matrix_power(u2, params.q) - eye),
        image_shift_order_residual=operator_norm(
            np.linalg.matrix_power(target_rep.V, 2 * params.q) - eye
        ),
    )


def iterate_theta_halving(
    params: TorusParams, steps: int, max_dim: int = 128, tol: float = TOL_TORUS
) -> list[ThetaHalvingReport]:
    """Repeatedly halve the rotation parameter, reporting every step."""
    if steps < 1:
        raise ValueError("need at least one halving step")
    reports = []
    current = params
    for _ in range(steps):
        report = theta_halving_embedding(current, max_dim=max_dim, tol=tol)
        reports.append(report)
        current = report.target
    return reports
