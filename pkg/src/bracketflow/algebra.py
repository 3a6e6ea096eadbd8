"""Lie brackets as structure-constant tensors on a fixed split space g = k (+) p.

A bracket is stored as the dense tensor c[i, j, k] with

    mu(e_i, e_j) = sum_k c[i, j, k] e_k,

indices 0..q-1 spanning the isotropy factor k and q..q+n-1 spanning p.  The
fixed basis is orthonormal for the reference inner product and <k, p> = 0, so
tensor norms are plain Frobenius norms of coefficient arrays.

The module provides the group action h.mu, its infinitesimal version
delta_mu(A) = mu(A., .) + mu(., A.) - A mu(., .), the moment map M defined by
tr(M E) = -1/4 <delta_{mu_p}(E), mu_p>, the skew maps J_{mu_k}(Z), and
derivation spaces, i.e. everything downstream flows need from the algebra side.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, SingularOperatorError

# Default absolute tolerance for Jacobi residuals, kernel tests and nullspace
# thresholding; all desk examples are exact rationals in double precision.
DEFAULT_TOL = 1e-9

# Condition-number bound above which a basis change is refused.
DEFAULT_COND_BOUND = 1e12


@dataclass(frozen=True)
class SplitSpace:
    """Fixed decomposition g = k (+) p with dim k = q, dim p = n."""

    q: int
    n: int

    def __post_init__(self):
        if self.q < 0 or self.n < 1:
            raise DimensionMismatchError(f"need q >= 0 and n >= 1, got q={self.q}, n={self.n}")

    @property
    def dim(self) -> int:
        return self.q + self.n


def _as_readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LieBracket:
    """Antisymmetric structure-constant tensor, a point of the variety of brackets.

    Antisymmetry in the first two slots is enforced at construction by
    projecting onto the antisymmetric part; exact user input (i < j entries)
    passes through unchanged.
    """

    space: SplitSpace
    c: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = self.space.dim
        c = np.asarray(self.c, dtype=float)
        if c.shape != (d, d, d):
            raise DimensionMismatchError(f"structure constants must have shape {(d, d, d)}, got {c.shape}")
        c = 0.5 * (c - c.transpose(1, 0, 2))
        object.__setattr__(self, "c", _as_readonly(c))

    @classmethod
    def from_entries(cls, space: SplitSpace, entries: dict[tuple[int, int, int], float]) -> "LieBracket":
        """Build from {(i, j, k): v} with 0-based i < j; the mirror is filled in."""
        d = space.dim
        c = np.zeros((d, d, d))
        for (i, j, k), v in entries.items():
            if not 0 <= i < j < d or not 0 <= k < d:
                raise DimensionMismatchError(f"entry ({i},{j},{k}) out of range for dim {d}")
            c[i, j, k] += v
            c[j, i, k] -= v
        return cls(space, c)

    @classmethod
    def zero(cls, space: SplitSpace) -> "LieBracket":
        d = space.dim
        return cls(space, np.zeros((d, d, d)))

    # -- block views ------------------------------------------------------

    @property
    def q(self) -> int:
        return self.space.q

    @property
    def n(self) -> int:
        return self.space.n

    def mu_p(self) -> np.ndarray:
        """p-component of mu|_{p x p}, shape (n, n, n)."""
        q = self.q
        return self.c[q:, q:, q:]

    def mu_k(self) -> np.ndarray:
        """k-component of mu|_{p x p}, shape (n, n, q)."""
        q = self.q
        return self.c[q:, q:, :q]

    def kg_block(self) -> np.ndarray:
        """All components with a k argument: mu|_{k x g} as c[:q, :, :]."""
        return self.c[: self.q]

    def ad(self, x: np.ndarray) -> np.ndarray:
        """Matrix of ad_mu(x) = mu(x, .) on g."""
        return np.einsum("ijk,i->kj", self.c, x)

    def ad_p(self, a: int) -> np.ndarray:
        """Matrix of ad_mu(Z_a)|_p for the a-th basis vector of k."""
        q = self.q
        return self.c[a, q:, q:].T

    def norm(self) -> float:
        return float(np.linalg.norm(self.c))

    def norm_p(self) -> float:
        return float(np.linalg.norm(self.mu_p()))

    def norm_k(self) -> float:
        return float(np.linalg.norm(self.mu_k()))

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """mu(x, y) for coefficient vectors x, y on g."""
        return np.einsum("ijk,i,j->k", self.c, x, y)


def bracket_inner(mu: LieBracket, lam: LieBracket) -> float:
    """<mu, lam> = sum_{i,j} <mu(e_i,e_j), lam(e_i,e_j)> over ordered pairs."""
    if mu.space != lam.space:
        raise DimensionMismatchError("brackets live on different split spaces")
    return float(np.sum(mu.c * lam.c))


def jacobi_residual(mu: LieBracket) -> float:
    """Frobenius norm of the Jacobiator mu(mu(X,Y),Z) + cyclic over basis triples."""
    c = mu.c
    t = np.einsum("ijk,klm->ijlm", c, c)
    jac = t + t.transpose(2, 0, 1, 3) + t.transpose(1, 2, 0, 3)
    return float(np.linalg.norm(jac))


def delta(mu: LieBracket, a_mat: np.ndarray) -> np.ndarray:
    """delta_mu(A) = mu(A., .) + mu(., A.) - A mu(., .) as a (d, d, d) tensor.

    Equals minus the derivative of h -> h.mu at the identity in direction A;
    vanishes exactly when A is a derivation of mu.
    """
    c = mu.c
    d = mu.space.dim
    a_mat = np.asarray(a_mat, dtype=float)
    if a_mat.shape != (d, d):
        raise DimensionMismatchError(f"operator must be {d}x{d}, got {a_mat.shape}")
    return (
        np.einsum("ai,ajk->ijk", a_mat, c)
        + np.einsum("aj,iak->ijk", a_mat, c)
        - np.einsum("ka,ija->ijk", a_mat, c)
    )


def delta_p(mu_p: np.ndarray, a_mat: np.ndarray) -> np.ndarray:
    """delta on the p-component only: mu_p is (n, n, n), A is (n, n)."""
    return (
        np.einsum("ai,ajk->ijk", a_mat, mu_p)
        + np.einsum("aj,iak->ijk", a_mat, mu_p)
        - np.einsum("ka,ija->ijk", a_mat, mu_p)
    )


def act(h: np.ndarray, mu: LieBracket, cond_bound: float = DEFAULT_COND_BOUND) -> LieBracket:
    """Basis-change action (h.mu)(X, Y) = h mu(h^{-1} X, h^{-1} Y)."""
    d = mu.space.dim
    h = np.asarray(h, dtype=float)
    if h.shape != (d, d):
        raise DimensionMismatchError(f"h must be {d}x{d}, got {h.shape}")
    if not np.all(np.isfinite(h)) or np.linalg.cond(h) > cond_bound:
        raise SingularOperatorError("h is singular or too ill-conditioned to act on brackets")
    hinv = np.linalg.inv(h)
    c_new = np.einsum("ai,bj,kc,abc->ijk", hinv, hinv, h, mu.c, optimize=True)
    return LieBracket(mu.space, c_new)


def embed_p_operator(h_p: np.ndarray, space: SplitSpace) -> np.ndarray:
    """Block operator [[I, 0], [0, h_p]] on g from an operator on p."""
    q, d = space.q, space.dim
    h_p = np.asarray(h_p, dtype=float)
    if h_p.shape != (space.n, space.n):
        raise DimensionMismatchError(f"p-operator must be {space.n}x{space.n}")
    out = np.eye(d)
    out[q:, q:] = h_p
    return out


def block_p_operator(a_p: np.ndarray, space: SplitSpace) -> np.ndarray:
    """Block operator [[0, 0], [0, A_p]] on g (annihilates k, preserves p)."""
    q, d = space.q, space.dim
    a_p = np.asarray(a_p, dtype=float)
    if a_p.shape != (space.n, space.n):
        raise DimensionMismatchError(f"p-operator must be {space.n}x{space.n}")
    out = np.zeros((d, d))
    out[q:, q:] = a_p
    return out


def scale_bracket(mu: LieBracket, s: float) -> LieBracket:
    """Geometric scaling s.mu: identity on k x g, s^2 mu_k + s mu_p on p x p.

    Realized by the action of [[I, 0], [0, (1/s) I]]; computed blockwise so the
    untouched components are bit-exact.
    """
    if s == 0:
        raise SingularOperatorError("scaling factor must be nonzero")
    q = mu.space.q
    c_new = np.array(mu.c)
    c_new[q:, q:, :q] *= s * s
    c_new[q:, q:, q:] *= s
    return LieBracket(mu.space, c_new)


def moment_map(mu: LieBracket) -> np.ndarray:
    """Symmetric M on p with tr(M E) = -1/4 <delta_{mu_p}(E), mu_p> for all E.

    Assembled by pairing the defining trace identity against all elementary
    operators E_ab at once: with G[a, b] = <delta_{mu_p}(E_ab), mu_p>, the
    identity reads M[b, a] = -G[a, b] / 4.  Depends only on mu_p.
    """
    mp = mu.mu_p()
    # <delta(E_ab), mu_p> expanded over the three delta terms.
    g1 = np.einsum("bjk,ajk->ab", mp, mp)
    g2 = np.einsum("ibk,iak->ab", mp, mp)
    g3 = np.einsum("ijb,ija->ab", mp, mp)
    g = g1 + g2 - g3
    return -0.25 * g.T


def moment_map_normalized(mu: LieBracket) -> np.ndarray:
    """m(mu_p) = 4 M / |mu_p|^2, the moment-map value on the unit sphere."""
    np2 = float(np.sum(mu.mu_p() ** 2))
    if np2 == 0.0:
        raise SingularOperatorError("normalized moment map undefined at mu_p = 0")
    return (4.0 / np2) * moment_map(mu)


def j_map(mu: LieBracket, a: int) -> np.ndarray:
    """Skew map J_{mu_k}(Z_a) on p defined by <J(Z)X, Y> = <mu_k(X, Y), Z>."""
    q = mu.space.q
    if q == 0:
        raise DimensionMismatchError("j_map requires q >= 1")
    if not 0 <= a < q:
        raise DimensionMismatchError(f"k-basis index {a} out of range for q={q}")
    # J[y, x] = <mu(e_{q+x}, e_{q+y}), Z_a> = c[q+x, q+y, a]
    return mu.c[q:, q:, a].T


def j_map_square_sum(mu: LieBracket) -> np.ndarray:
    """sum_a J_{mu_k}(Z_a)^2 over an orthonormal basis of k (zero matrix if q = 0)."""
    n, q = mu.space.n, mu.space.q
    out = np.zeros((n, n))
    for a in range(q):
        jm = j_map(mu, a)
        out += jm @ jm
    return out


def _nullspace(mat: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal nullspace basis (columns) via SVD thresholding at tol * sigma_max."""
    u, s, vh = np.linalg.svd(mat, full_matrices=True)
    if s.size == 0:
        return np.eye(mat.shape[1])
    cutoff = tol * s[0] if s[0] > 0 else tol
    rank = int(np.sum(s > cutoff))
    return vh[rank:].T


def derivation_space(mu: LieBracket, block_constraint: str = "none", tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Orthonormal basis of {A : delta_mu(A) = 0} with an optional block shape.

    block_constraint "none" searches all of gl(g); "p-only" restricts to
    operators [[0, 0], [0, D_p]].  Returned matrices are (d, d), orthonormal in
    the Frobenius inner product, each with |delta_mu(D)| <= tol * max(1, |mu|).
    """
    d = mu.space.dim
    q = mu.space.q
    if block_constraint == "none":
        gens = [(i, j) for i in range(d) for j in range(d)]
    elif block_constraint == "p-only":
        gens = [(i, j) for i in range(q, d) for j in range(q, d)]
    else:
        raise ValueError(f"unknown block constraint {block_constraint!r}")

    cols = np.zeros((d ** 3, len(gens)))
    for m, (i, j) in enumerate(gens):
        e = np.zeros((d, d))
        e[i, j] = 1.0
        cols[:, m] = delta(mu, e).ravel()
    null = _nullspace(cols, tol)

    basis = []
    scale = max(1.0, mu.norm())
    for m in range(null.shape[1]):
        a_mat = np.zeros((d, d))
        for g_idx, (i, j) in enumerate(gens):
            a_mat[i, j] = null[g_idx, m]
        if np.linalg.norm(delta(mu, a_mat)) <= max(tol, 1e2 * tol * scale):
            basis.append(a_mat)
    return basis


def check_admissible(mu: LieBracket, gamma=None, tol: float = DEFAULT_TOL) -> dict:
    """Check conditions (h1), (h3) and, when a structure is given, (h4).

    h1: Jacobi holds, mu(k,k) in k and mu(k,p) in p.
    h3: Z -> ad_mu(Z)|_p has trivial kernel on k.
    h4: gamma is annihilated by theta(ad_mu Z|_p) for every basis Z of k.
    Closedness of the isotropy subgroup (h2) is not algorithmically decidable
    here and is reported as unchecked.
    """
    q, n = mu.space.q, mu.space.n
    res_jac = jacobi_residual(mu)
    # component norms outside the allowed blocks
    res_kk = float(np.linalg.norm(mu.c[:q, :q, q:]))  # mu(k,k) escaping k
    res_kp = float(np.linalg.norm(mu.c[:q, q:, :q]))  # mu(k,p) escaping p
    h1_ok = res_jac <= tol and res_kk <= tol and res_kp <= tol

    if q == 0:
        h3_ok = True
        sigma_min = float("inf")
    else:
        cols = np.stack([mu.ad_p(a).ravel() for a in range(q)], axis=1)
        s = np.linalg.svd(cols, compute_uv=False)
        sigma_min = float(s[-1]) if s.size >= q else 0.0
        h3_ok = sigma_min > tol

    res_h4 = 0.0
    h4_ok = True
    if gamma is not None and q > 0:
        for a in range(q):
            t = gamma.theta(mu.ad_p(a))
            res_h4 = max(res_h4, float(np.linalg.norm(t)))
        h4_ok = res_h4 <= max(tol, tol * max(1.0, mu.norm()))

    return {
        "h1_ok": bool(h1_ok),
        "h3_ok": bool(h3_ok),
        "h4_ok": bool(h4_ok),
        "h2": "not checked",
        "residuals": {
            "jacobi": res_jac,
            "kk_outside_k": res_kk,
            "kp_outside_p": res_kp,
            "h3_sigma_min": sigma_min,
            "h4": res_h4,
        },
    }
