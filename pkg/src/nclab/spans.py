"""Word-spans of operator algebras under the Hilbert-Schmidt inner product.

A generated span materializes the algebra spanned by all products of
generators, their adjoints, and the identity up to a word-length cap, as an
orthonormal matrix basis.  Membership of any operator is then an orthogonal
projection.  On top of that sits the amplification-isomorphism check: two
root branches of the same unitary differ by a correction unitary whose
powers twist the amplified word algebra, and the induced word map is tested
for multiplicativity, adjoint-compatibility, module-compatibility, and span
preservation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import as_operator, hs_norm, operator_norm, spectral_decompose
from .roots import BranchFunction, correction_unitary, nth_root_branch

RANK_TOL = 1e-8
WORD_BUDGET = 200_000


@dataclass
class GeneratedAlgebraSpan:
    """Orthonormalized span of generator words.

    ``basis`` holds span_dim matrices, pairwise orthonormal in the
    Hilbert-Schmidt inner product, spanning every enumerated word.
    """

    generators: list[np.ndarray]
    word_cap: int
    basis: np.ndarray
    span_dim: int
    dim: int

    def report(self) -> dict:
        gen_residuals = [membership_residual(self, g) for g in self.generators]
        return {
            "span_dim": self.span_dim,
            "word_cap": self.word_cap,
            "residual_summary": {
                "max_generator_membership": max(gen_residuals) if gen_residuals else 0.0,
                "max_basis_orthonormality_defect": self._orthonormality_defect(),
            },
        }

    def _orthonormality_defect(self) -> float:
        flat = self.basis.reshape(self.span_dim, -1)
        gram = flat.conj() @ flat.T
        return float(np.max(np.abs(gram - np.eye(self.span_dim))))


class _GramSchmidt:
    """Incremental modified Gram-Schmidt over vectorized matrices."""

    def __init__(self, dim: int, rank_tol: float):
        self.dim = dim
        self.rank_tol = rank_tol
        self.rows: list[np.ndarray] = []

    def add(self, mat: np.ndarray) -> bool:
        """Orthogonalize ``mat`` against the basis; keep it if independent."""
        v = mat.reshape(-1).astype(complex)
        for _ in range(2):
            for row in self.rows:
                v = v - (row.conj() @ v) * row
        nrm = np.linalg.norm(v)
        if nrm < self.rank_tol:
            return False
        self.rows.append(v / nrm)
        return True

    def matrices(self) -> np.ndarray:
        return np.array(self.rows).reshape(len(self.rows), self.dim, self.dim)


def generate_span(
    generators,
    word_cap: int,
    rank_tol: float = RANK_TOL,
    word_budget: int = WORD_BUDGET,
) -> GeneratedAlgebraSpan:
    """Span of all words of length <= ``word_cap`` over generators, their
    adjoints, and the identity.

    Words are explored breadth-first in deterministic order: generators in
    the given order, then their adjoints.  Each length step multiplies the
    newly found independent directions by every letter, which spans exactly
    the same space as enumerating every word while keeping the work
    proportional to the span dimension.
    """
    generators = [as_operator(g) for g in generators]
    if not generators:
        raise ValueError("need at least one generator")
    dim = generators[0].shape[0]
    for g in generators:
        if g.shape[0] != dim:
            raise ValueError("generators must share one dimension")
    if word_cap < 1:
        raise ValueError("word cap must be at least 1")

    alphabet = generators + [g.conj().T for g in generators]
    gs = _GramSchmidt(dim, rank_tol)
    gs.add(np.eye(dim, dtype=complex))
    frontier = [np.eye(dim, dtype=complex)]
    processed = 0
    for _ in range(word_cap):
        new_frontier = []
        for word in frontier:
            for letter in alphabet:
                processed += 1
                if processed > word_budget:
                    raise ValueError(
                        f"word budget exceeded: more than {word_budget} candidate words"
                    )
                candidate = word @ letter
                if gs.add(candidate):
                    new_frontier.append(candidate)
        frontier = new_frontier
        if not frontier or len(gs.rows) == dim * dim:
            break

    span = GeneratedAlgebraSpan(
        generators=generators,
        word_cap=word_cap,
        basis=gs.matrices(),
        span_dim=len(gs.rows),
        dim=dim,
    )
    for i, g in enumerate(generators):
        res = membership_residual(span, g)
        if res > 1e-10:
            raise ArithmeticError(f"generator {i} escaped its own span: residual {res:.3e}")
    return span


def membership_residual(span: GeneratedAlgebraSpan, x) -> float:
    """Relative distance of ``x`` from the span: ||x - P(x)||_F / max(1, ||x||_F)."""
    x = as_operator(x)
    if x.shape[0] != span.dim:
        raise ValueError(f"dimension mismatch: {x.shape[0]} vs span dim {span.dim}")
    v = x.reshape(-1)
    flat = span.basis.reshape(span.span_dim, -1)
    residual = v - flat.T @ (flat.conj() @ v)
    return float(np.linalg.norm(residual)) / max(1.0, hs_norm(x))


def power_membership_residuals(span: GeneratedAlgebraSpan, v, n: int) -> list[float]:
    """Membership residuals of v, v**2, ..., v**(n-1) against a base span.

    A soft numerical witness that the intermediate root powers lie outside
    the base algebra; large residuals are evidence, not proof.
    """
    v = as_operator(v)
    return [
        membership_residual(span, np.linalg.matrix_power(v, i)) for i in range(1, n)
    ]


def _bfs_words(alphabet: list[np.ndarray], max_len: int, cap: int) -> list[np.ndarray]:
    """Deterministic breadth-first word matrices, exact duplicates dropped."""
    dim = alphabet[0].shape[0]
    words = [np.eye(dim, dtype=complex)]
    seen = {(np.round(words[0], 12) + 0.0).tobytes()}
    frontier = [words[0]]
    for _ in range(max_len):
        nxt = []
        for word in frontier:
            for letter in alphabet:
                cand = word @ letter
                key = (np.round(cand, 12) + 0.0).tobytes()  # +0.0 folds -0.0 into 0.0
                if key in seen:
                    continue
                seen.add(key)
                words.append(cand)
                nxt.append(cand)
                if len(words) >= cap:
                    return words
        frontier = nxt
        if not frontier:
            break
    return words


def _kron3(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.kron(np.kron(a, b), c)


def _span_dim_of(mats: list[np.ndarray], rank_tol: float) -> int:
    gs = _GramSchmidt(mats[0].shape[0], rank_tol)
    for m in mats:
        gs.add(m)
    return len(gs.rows)


@dataclass
class AmplificationIsoReport:
    """Residuals of the branch-swap map on amplified words.

    The map rewrites every root factor from one branch to the other and
    multiplies the amplification leg by the matching power of the
    correction unitary; the four quantities quantify how far that word map
    is from a bijective adjoint-preserving algebra and module isomorphism.
    """

    multiplicativity_residual: float
    adjoint_residual: float
    module_residual: float
    word_calculus_residual: float
    correction_order_residual: float
    domain_span_dim: int
    image_span_dim: int
    span_dims_equal: bool
    word_count: int
    pair_count: int


def amplification_iso_check(
    A_generators,
    u,
    xi: BranchFunction,
    eta: BranchFunction,
    m: int,
    L: int,
    seed: int = 0,
    rank_tol: float = RANK_TOL,
    max_a_words: int = 24,
    max_pairs: int = 200,
) -> AmplificationIsoReport:
    """Check the amplified isomorphism induced by swapping two root branches.

    Words carry a normal form (root power k < n, base word a, correction
    power j < n on the amplification leg, m-by-m matrix unit x); the map
    sends the k-th root power of the xi-branch root times a to the same
    power of the eta-branch root times a, twisting the amplification leg by
    the k-th power of the correction unitary w = (xi/eta)(u).

    Reported residuals:
      multiplicativity: T on the folded product of two words versus the
        matrix product of their images (folding uses root**n = u and
        w**n = I, so this is where those identities are exercised);
      adjoint: T on the folded formal adjoint versus the adjoint of the
        image;
      module: prepending a base word versus multiplying the image by it;
      word_calculus: the domain-side folding versus honest matrix products,
        the brute-force oracle for the normal form itself.

    Span dimensions of domain and image words are compared for bijectivity.
    The amplification leg is sampled as correction powers tensor matrix
    units, the smallest truncation on which the correction acts.
    """
    if xi.n != eta.n:
        raise ValueError(f"branch orders differ: {xi.n} vs {eta.n}")
    if m < 1:
        raise ValueError("amplification size must be at least 1")
    if L < 1:
        raise ValueError("word cap must be at least 1")
    n = xi.n
    u = as_operator(u)
    dim = u.shape[0]
    dec = spectral_decompose(u)
    xi_u = nth_root_branch(u, xi, dec=dec)
    eta_u = nth_root_branch(u, eta, dec=dec)
    w = correction_unitary(u, xi, eta, dec=dec)

    ident = np.eye(dim, dtype=complex)
    xi_pows = [ident]
    eta_pows = [ident]
    w_pows = [np.eye(dim, dtype=complex)]
    for _ in range(n):
        xi_pows.append(xi_pows[-1] @ xi_u)
        eta_pows.append(eta_pows[-1] @ eta_u)
    for _ in range(2 * n):
        w_pows.append(w_pows[-1] @ w)
    u_pows = [ident, u]
    correction_order_residual = operator_norm(w_pows[n] - np.eye(dim))

    base = [as_operator(g) for g in A_generators]
    for g in base:
        if g.shape[0] != dim:
            raise ValueError("base generators must share the root unitary's dimension")
    alphabet = base + [u] + [g.conj().T for g in base] + [u.conj().T]
    a_words = _bfs_words(alphabet, L, max_a_words)

    units = [
        np.zeros((m, m), dtype=complex) for _ in range(m * m)
    ]
    for i in range(m):
        for j in range(m):
            units[i * m + j][i, j] = 1.0
    eye_m = np.eye(m, dtype=complex)

    words = [
        (k, ai, j, xidx)
        for k in range(n)
        for ai in range(len(a_words))
        for j in range(n)
        for xidx in range(len(units))
    ]

    def domain_matrix(word):
        k, ai, j, x = word
        return _kron3(xi_pows[k] @ a_words[ai], w_pows[j], units[x])

    def image_matrix(word):
        k, ai, j, x = word
        return _kron3(eta_pows[k] @ a_words[ai], w_pows[k + j], units[x])

    def image_of_product(s, t):
        ks, ai_s, js, xs = s
        kt, ai_t, jt, xt = t
        fold, k = divmod(ks + kt, n)
        j = (js + jt) % n
        a = u_pows[fold] @ a_words[ai_s] @ a_words[ai_t]
        return _kron3(eta_pows[k] @ a, w_pows[k + j], units[xs] @ units[xt])

    def domain_of_product(s, t):
        ks, ai_s, js, xs = s
        kt, ai_t, jt, xt = t
        fold, k = divmod(ks + kt, n)
        j = (js + jt) % n
        a = u_pows[fold] @ a_words[ai_s] @ a_words[ai_t]
        return _kron3(xi_pows[k] @ a, w_pows[j], units[xs] @ units[xt])

    def image_of_adjoint(s):
        # Adjoint in normal form: root power n-k with one inverse of u folded
        # into the base word, correction power n-j on the amplification leg.
        k, ai, j, x = s
        ka = (n - k) % n
        ja = (n - j) % n
        a = a_words[ai].conj().T
        if k > 0:
            a = u.conj().T @ a
        return _kron3(eta_pows[ka] @ a, w_pows[ka + ja], units[x].conj().T)

    rng = np.random.default_rng(seed)
    total = len(words)
    if total * total <= max_pairs:
        pairs = [(s, t) for s in words for t in words]
    else:
        idx = rng.integers(0, total, size=(max_pairs, 2))
        pairs = [(words[i], words[j]) for i, j in idx]

    mult_res = 0.0
    calc_res = 0.0
    for s, t in pairs:
        ds, dt = domain_matrix(s), domain_matrix(t)
        ims, imt = image_matrix(s), image_matrix(t)
        mult_res = max(mult_res, operator_norm(image_of_product(s, t) - ims @ imt))
        calc_res = max(calc_res, operator_norm(domain_of_product(s, t) - ds @ dt))

    sample_words = (
        words
        if len(words) <= max_pairs
        else [words[i] for i in rng.integers(0, total, size=max_pairs)]
    )
    adj_res = 0.0
    for s in sample_words:
        adj_res = max(adj_res, operator_norm(image_of_adjoint(s) - image_matrix(s).conj().T))

    module_res = 0.0
    acting = range(min(len(a_words), 8))
    for ai in acting:
        for s in sample_words[: max(1, max_pairs // len(acting))]:
            k, si, j, x = s
            lhs = _kron3(a_words[ai] @ eta_pows[k] @ a_words[si], w_pows[k + j], units[x])
            rhs = _kron3(a_words[ai], ident, eye_m) @ image_matrix(s)
            module_res = max(module_res, operator_norm(lhs - rhs))

    # Span dimensions factor over the matrix-unit leg, which always
    # contributes a full m*m factor on both sides.
    leg12_dom = [
        np.kron(xi_pows[k] @ a_words[ai], w_pows[j])
        for k in range(n)
        for ai in range(len(a_words))
        for j in range(n)
    ]
    leg12_img = [
        np.kron(eta_pows[k] @ a_words[ai], w_pows[k + j])
        for k in range(n)
        for ai in range(len(a_words))
        for j in range(n)
    ]
    dom_dim = _span_dim_of(leg12_dom, rank_tol) * m * m
    img_dim = _span_dim_of(leg12_img, rank_tol) * m * m

    return AmplificationIsoReport(
        multiplicativity_residual=mult_res,
        adjoint_residual=adj_res,
        module_residual=module_res,
        word_calculus_residual=calc_res,
        correction_order_residual=correction_order_residual,
        domain_span_dim=dom_dim,
        image_span_dim=img_dim,
        span_dims_equal=dom_dim == img_dim,
        word_count=len(words),
        pair_count=len(pairs),
    )
