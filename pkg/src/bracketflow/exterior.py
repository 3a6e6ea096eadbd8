"""Exterior algebra over p*: k-forms, wedge, interior product, Hodge star,
the Chevalley-Eilenberg differential d_mu and the Hodge Laplacian.

Coefficients are stored on strictly increasing multi-indices.  The reference
frame e^1, ..., e^n is orthonormal and the orientation is fixed as
e^1 ^ ... ^ e^n; every Hodge sign flows from that choice.  For a general
positive-definite metric the star is computed by a Cholesky change to a
g-orthonormal frame, which preserves the orientation.

Sign conventions (documented because the Laplacian depends on them):
  * d on 1-forms:  (d xi)(X, Y) = -xi(mu(X, Y)), extended by the graded
    Leibniz rule, so d e^m = -sum_{u<v} c_uv^m e^{uv}.
  * codifferential on k-forms in dimension n (Riemannian):
    d* = (-1)^(n(k+1)+1) * d *; for odd n this is (-1)^k * d *.
  * Laplacian:  Lap = d d* + d* d.  On 3-forms in dimension 7 this expands to
    -d*d* + *d*d*... i.e. Lap = -d(*d*) + *d*(d .), the convention used by the
    G2 benchmark below.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .algebra import LieBracket, jacobi_residual
from .errors import DegenerateStructureError, DimensionMismatchError


@lru_cache(maxsize=None)
def multi_indices(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All strictly increasing k-tuples from {0, ..., n-1}."""
    return tuple(combinations(range(n), k))


@lru_cache(maxsize=None)
def _index_pos(n: int, k: int) -> dict:
    return {idx: pos for pos, idx in enumerate(multi_indices(n, k))}


def _ordered_sign(seq: tuple[int, ...]) -> tuple[tuple[int, ...] | None, int]:
    """Sort an index tuple, returning (sorted tuple, permutation sign); duplicates give (None, 0)."""
    if len(set(seq)) != len(seq):
        return None, 0
    arr = list(seq)
    sign = 1
    # insertion sort; counts inversions for the parity
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1] > arr[j]:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            sign = -sign
            j -= 1
    return tuple(arr), sign


@dataclass(frozen=True)
class KForm:
    """A k-form on an n-dimensional oriented inner-product space."""

    n: int
    k: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise DimensionMismatchError(f"degree {self.k} out of range for dimension {self.n}")
        c = np.asarray(self.coeffs, dtype=float)
        m = len(multi_indices(self.n, self.k))
        if c.shape != (m,):
            raise DimensionMismatchError(f"degree-{self.k} form on R^{self.n} needs {m} coefficients, got {c.shape}")
        c = np.array(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, n: int, k: int) -> "KForm":
        return cls(n, k, np.zeros(len(multi_indices(n, k))))

    @classmethod
    def from_terms(cls, n: int, k: int, terms: dict[tuple[int, ...], float]) -> "KForm":
        """Build from {increasing 0-based multi-index: coefficient}."""
        pos = _index_pos(n, k)
        c = np.zeros(len(pos))
        for idx, v in terms.items():
            srt, sign = _ordered_sign(tuple(idx))
            if srt is None:
                raise DimensionMismatchError(f"repeated index in {idx}")
            c[pos[srt]] += sign * v
        return cls(n, k, c)

    def component(self, idx: tuple[int, ...]) -> float:
        """Value on an arbitrary basis index tuple (sign of the sorting permutation applied)."""
        if len(idx) != self.k:
            raise DimensionMismatchError(f"expected {self.k} indices, got {len(idx)}")
        srt, sign = _ordered_sign(tuple(idx))
        if srt is None:
            return 0.0
        return sign * float(self.coeffs[_index_pos(self.n, self.k)[srt]])

    def terms(self) -> dict[tuple[int, ...], float]:
        idxs = multi_indices(self.n, self.k)
        return {idxs[m]: float(v) for m, v in enumerate(self.coeffs) if v != 0.0}

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def __add__(self, other: "KForm") -> "KForm":
        self._check_same(other)
        return KForm(self.n, self.k, self.coeffs + other.coeffs)

    def __sub__(self, other: "KForm") -> "KForm":
        self._check_same(other)
        return KForm(self.n, self.k, self.coeffs - other.coeffs)

    def __mul__(self, s: float) -> "KForm":
        return KForm(self.n, self.k, self.coeffs * float(s))

    __rmul__ = __mul__

    def _check_same(self, other: "KForm"):
        if self.n != other.n or self.k != other.k:
            raise DimensionMismatchError("forms have different dimension or degree")


def form_inner(a: KForm, b: KForm) -> float:
    """Inner product in the orthonormal reference frame: sum over increasing indices."""
    a._check_same(b)
    return float(np.dot(a.coeffs, b.coeffs))


@lru_cache(maxsize=None)
def wedge_table(n: int, ka: int, kb: int) -> np.ndarray:
    """Dense tensor W with (a ^ b) = einsum('KIJ,I,J->K', W, a, b)."""
    if ka + kb > n:
        raise DimensionMismatchError(f"wedge degree {ka}+{kb} exceeds dimension {n}")
    ia, ib = multi_indices(n, ka), multi_indices(n, kb)
    pos_out = _index_pos(n, ka + kb)
    w = np.zeros((len(pos_out), len(ia), len(ib)))
    for pa, idx_a in enumerate(ia):
        for pb, idx_b in enumerate(ib):
            srt, sign = _ordered_sign(idx_a + idx_b)
            if srt is not None:
                w[pos_out[srt], pa, pb] = sign
    return w


def wedge(a: KForm, b: KForm) -> KForm:
    if a.n != b.n:
        raise DimensionMismatchError("forms on different spaces")
    w = wedge_table(a.n, a.k, b.k)
    return KForm(a.n, a.k + b.k, np.einsum("KIJ,I,J->K", w, a.coeffs, b.coeffs))


@lru_cache(maxsize=None)
def interior_tables(n: int, k: int) -> np.ndarray:
    """Stack of matrices M_i with iota_{e_i} a = M_i @ a, shape (n, C(n,k-1), C(n,k))."""
    if k < 1:
        raise DimensionMismatchError("interior product needs degree >= 1")
    src = multi_indices(n, k)
    pos_out = _index_pos(n, k - 1)
    out = np.zeros((n, len(pos_out), len(src)))
    for p_in, idx in enumerate(src):
        for s, i in enumerate(idx):
            rest = idx[:s] + idx[s + 1:]
            out[i, pos_out[rest], p_in] = (-1.0) ** s
    return out


def interior(x: np.ndarray, a: KForm) -> KForm:
    """iota_X a for a coefficient vector X on the underlying space."""
    x = np.asarray(x, dtype=float)
    if x.shape != (a.n,):
        raise DimensionMismatchError(f"vector must have length {a.n}")
    tables = interior_tables(a.n, a.k)
    return KForm(a.n, a.k - 1, np.einsum("i,iPQ,Q->P", x, tables, a.coeffs))


@lru_cache(maxsize=None)
def _star_permutation(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """(positions of complements, signs) with *(e^I) = sign * e^{I^c} at the identity metric."""
    src = multi_indices(n, k)
    pos_out = _index_pos(n, n - k)
    perm = np.zeros(len(src), dtype=int)
    signs = np.zeros(len(src))
    for p, idx in enumerate(src):
        comp = tuple(i for i in range(n) if i not in idx)
        _, sign = _ordered_sign(idx + comp)
        perm[p] = pos_out[comp]
        signs[p] = sign
    return perm, signs


def _star_identity(a: KForm) -> KForm:
    perm, signs = _star_permutation(a.n, a.k)
    out = np.zeros(len(multi_indices(a.n, a.n - a.k)))
    out[perm] = signs * a.coeffs
    return KForm(a.n, a.n - a.k, out)


@lru_cache(maxsize=None)
def _combo_array(n: int, k: int) -> np.ndarray:
    return np.array(multi_indices(n, k), dtype=int).reshape(-1, max(k, 1) if k else 0)


def pullback_matrix(s_mat: np.ndarray, n: int, k: int) -> np.ndarray:
    """Matrix P of the pullback S* on degree-k coefficients: (S*a) = P @ a.

    P[I, J] = det of the submatrix S[rows=J, cols=I], so that
    (S*a)(e_I) = a(S e_{i_1}, ..., S e_{i_k}).
    """
    if k == 0:
        return np.eye(1)
    idx = _combo_array(n, k)
    sub = s_mat[idx[None, :, :, None], idx[:, None, None, :]]
    # sub[I, J, r, c] = S[J[r], I[c]]; batched determinant over the last two axes
    dets = np.linalg.det(sub)
    return dets


def pullback(s_mat: np.ndarray, a: KForm) -> KForm:
    s_mat = np.asarray(s_mat, dtype=float)
    if s_mat.shape != (a.n, a.n):
        raise DimensionMismatchError("pullback operator has wrong shape")
    p = pullback_matrix(s_mat, a.n, a.k)
    return KForm(a.n, a.k, p @ a.coeffs)


@lru_cache(maxsize=None)
def theta_form_table(n: int, k: int) -> np.ndarray:
    """Tensor T with theta(A) a = einsum('KmvL,mv,L->K', T, A, a).

    theta(A) on a k-form replaces one argument slot at a time:
    (theta(A) a)(X_1..X_k) = -sum_s a(X_1, .., A X_s, .., X_k).
    """
    src = multi_indices(n, k)
    pos = _index_pos(n, k)
    t = np.zeros((len(src), n, n, len(src)))
    for p_in, idx in enumerate(src):
        for s, v in enumerate(idx):
            for m in range(n):
                repl = idx[:s] + (m,) + idx[s + 1:]
                srt, sign = _ordered_sign(repl)
                if srt is not None:
                    t[pos[srt], m, v, p_in] -= sign
    return t


def theta_form(a_mat: np.ndarray, a: KForm) -> KForm:
    """Infinitesimal gl-action on forms, theta(A) a = d/dt|_0 (e^{-tA})^* a."""
    a_mat = np.asarray(a_mat, dtype=float)
    if a_mat.shape != (a.n, a.n):
        raise DimensionMismatchError("operator has wrong shape")
    t = theta_form_table(a.n, a.k)
    return KForm(a.n, a.k, np.einsum("KmvL,mv,L->K", t, a_mat, a.coeffs))


@lru_cache(maxsize=None)
def _ce_table(n: int, k: int) -> np.ndarray:
    """Fixed tensor turning structure constants into the degree-k differential matrix.

    d(e^I) = sum_s (-1)^(s-1) e^{i_1..} ^ d(e^{i_s}) ^ {..i_k} with
    d e^m = -1/2 sum_{u,v} c_uv^m e^u ^ e^v; the table carries every sign so
    the matrix of d_mu on k-forms is one matmul with c.ravel().
    """
    src = multi_indices(n, k)
    pos_out = _index_pos(n, k + 1)
    table = np.zeros((n, n, n, len(pos_out), len(src)))
    for p_in, idx in enumerate(src):
        for s, m in enumerate(idx):
            prefix, suffix = idx[:s], idx[s + 1:]
            slot_sign = (-1.0) ** s  # (-1)^(s-1) for 1-based s
            for u in range(n):
                for v in range(n):
                    if u == v:
                        continue
                    srt, sign = _ordered_sign(prefix + (u, v) + suffix)
                    if srt is not None:
                        table[u, v, m, pos_out[srt], p_in] += -0.5 * slot_sign * sign
    return table.reshape(n * n * n, len(pos_out) * len(src))


def ce_matrix(mu: LieBracket, k: int) -> np.ndarray:
    """Matrix of the Chevalley-Eilenberg differential on k-forms for a q = 0 bracket."""
    if mu.space.q != 0:
        raise DimensionMismatchError("the differential of forms is built for q = 0 (Lie group) brackets")
    n = mu.space.n
    if k >= n:
        raise DimensionMismatchError(f"no (k+1)-forms beyond the top degree n = {n}")
    table = _ce_table(n, k)
    out = mu.c.ravel() @ table
    return out.reshape(len(multi_indices(n, k + 1)), len(multi_indices(n, k)))


def ce_differential(mu: LieBracket, a: KForm) -> KForm:
    """d_mu a; for 1-forms (d xi)(X, Y) = -xi(mu(X, Y))."""
    if a.n != mu.space.n or mu.space.q != 0:
        raise DimensionMismatchError("form and bracket dimensions disagree or q != 0")
    return KForm(a.n, a.k + 1, ce_matrix(mu, a.k) @ a.coeffs)


def _check_metric(g: np.ndarray, n: int) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.shape != (n, n):
        raise DimensionMismatchError(f"metric must be {n}x{n}")
    if np.linalg.norm(g - g.T) > 1e-12 * max(1.0, np.linalg.norm(g)):
        raise DegenerateStructureError("metric is not symmetric")
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise DegenerateStructureError("metric is not positive definite") from None
    return g


def orthonormal_frame_map(g: np.ndarray) -> np.ndarray:
    """S with columns a positively oriented g-orthonormal basis: S^T g S = I."""
    l_chol = np.linalg.cholesky(g)
    return np.linalg.inv(l_chol).T


def hodge_star(a: KForm, g: np.ndarray | None = None) -> KForm:
    """Hodge star for the metric g (identity Gram matrix when omitted).

    General metrics are handled by pulling back to a g-orthonormal frame from a
    Cholesky factor; det S > 0 keeps the fixed orientation.
    """
    if g is None:
        return _star_identity(a)
    g = _check_metric(g, a.n)
    s_mat = orthonormal_frame_map(g)
    return pullback(np.linalg.inv(s_mat), _star_identity(pullback(s_mat, a)))


def codifferential(mu: LieBracket, a: KForm, g: np.ndarray | None = None) -> KForm:
    """d* on k-forms: (-1)^(n(k+1)+1) * d * (Riemannian signature)."""
    n, k = a.n, a.k
    if k == 0:
        return KForm.zero(n, 0)
    sign = (-1.0) ** (n * (k + 1) + 1)
    return sign * hodge_star(ce_differential(mu, hodge_star(a, g)), g)


def hodge_laplacian(mu: LieBracket, g: np.ndarray | None, a: KForm, tol: float = 1e-9) -> KForm:
    """Hodge Laplacian d d* + d* d for the left-invariant metric g on G_mu."""
    if mu.space.q != 0:
        raise DimensionMismatchError("Hodge Laplacian requires a q = 0 bracket")
    if jacobi_residual(mu) > tol * max(1.0, mu.norm() ** 2):
        raise DegenerateStructureError("bracket violates the Jacobi identity")
    out = KForm.zero(a.n, a.k)
    if a.k >= 1:
        out = out + ce_differential(mu, codifferential(mu, a, g))
    if a.k < a.n:
        out = out + codifferential(mu, ce_differential(mu, a), g)
    return out
