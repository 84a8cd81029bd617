"""Tomita operators of standard subspaces and their polar decomposition.

For a standard subspace K the Tomita operator ``s(h + ik) = h - ik`` is a
conjugate-linear involution of the whole (finite-dimensional) space.  Its
polar decomposition ``s = j delta^{1/2}`` gives the modular conjugation
``j`` and the modular operator ``delta``.  All functions of ``delta`` are
evaluated through the eigendecomposition of its complex d x d form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .hilbert import (
    ComplexSpace,
    RealSubspace,
    classify_pair,
    classify_subspace,
    complexify_matrix,
    null_space,
    orthonormal_basis,
    realify_matrix,
    span,
)

LINEARITY_TOL = 1e-8


class NotStandard(ValueError):
    def __init__(self, cls):
        self.classification = cls
        super().__init__(
            f"subspace is not standard: dim(K /\\ iK) = {cls.dim_complex_part}, "
            f"codim(K + iK) = {cls.dim_cyclic_defect}")


class NotStandardPair(ValueError):
    pass


class Singular(ValueError):
    pass


class NotInvolution(ValueError):
    pass


def linearity(A, Jc, tol=LINEARITY_TOL):
    """Classify a real matrix as 'complex', 'conjugate' or 'neither'."""
    scale = max(1.0, float(np.linalg.norm(A, 2)))
    if np.linalg.norm(A @ Jc - Jc @ A, 2) <= tol * scale:
        return "complex"
    if np.linalg.norm(A @ Jc + Jc @ A, 2) <= tol * scale:
        return "conjugate"
    return "neither"


@dataclass(frozen=True, eq=False)
class Operator:
    """A real-linear operator on the realified space, tagged by its linearity.

    If ``tag`` is given it is checked against the matrix; otherwise it is
    recomputed.
    """

    space: ComplexSpace
    A: np.ndarray = field(repr=False)
    tag: str | None = None

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        A.setflags(write=False)
        object.__setattr__(self, "A", A)
        found = linearity(A, self.space.Jc)
        if self.tag is not None and self.tag != found:
            raise ValueError(f"declared {self.tag}-linear, matrix is {found}")
        object.__setattr__(self, "tag", found)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            return Operator(self.space, self.A @ other.A)
        return self.A @ other

    def __call__(self, K):
        if isinstance(K, RealSubspace):
            return K.apply(self.A)
        return self.A @ np.asarray(K)

    def complex_form(self):
        if self.tag != "complex":
            raise ValueError("only complex-linear operators have a complex matrix form")
        return complexify_matrix(self.A)

    def norm(self):
        return float(np.linalg.norm(self.A, 2))


def _hermitian_function(H, f):
    w, V = np.linalg.eigh(H)
    return (V * f(w)) @ V.conj().T


@dataclass(frozen=True, eq=False)
class ModularData:
    """Tomita operator, modular conjugation and modular operator of a subspace.

    ``delta_eigvals``/``delta_eigvecs`` hold the eigendecomposition of the
    complex form of delta (eigenvalues ascending, counted with complex
    multiplicity).
    """

    K: RealSubspace
    s: Operator
    j: Operator
    delta: Operator
    delta_eigvals: np.ndarray
    delta_eigvecs: np.ndarray = field(repr=False)

    @property
    def space(self):
        return self.K.space

    @property
    def delta_spectrum(self):
        return np.sort(self.delta_eigvals)

    @property
    def theta_spectrum(self):
        lam = self.delta_eigvals
        return np.arccos(np.abs(lam - 1) / (lam + 1))

    def delta_function(self, f):
        """Complex-linear operator f(delta) as an :class:`Operator`."""
        V = self.delta_eigvecs
        C = (V * f(self.delta_eigvals)) @ V.conj().T
        return Operator(self.space, realify_matrix(C), "complex")

    def delta_power(self, p):
        return self.delta_function(lambda w: w ** p)

    def delta_it(self, t):
        """The unitary delta^{it}."""
        return self.delta_function(lambda w: np.exp(1j * t * np.log(w)))

    def to_json(self):
        return json.dumps({
            "dim_complex": self.space.d,
            "frame": self.K.frame.tolist(),
            "s": self.s.A.tolist(),
            "j": self.j.A.tolist(),
            "delta": self.delta.A.tolist(),
            "delta_spectrum": sorted(self.delta_eigvals.tolist()),
            "theta_spectrum": sorted(self.theta_spectrum.tolist()),
        })


def _modular_from_tomita(K, s):
    space = K.space
    delta_c = complexify_matrix(s.T @ s)
    delta_c = (delta_c + delta_c.conj().T) / 2
    w, V = np.linalg.eigh(delta_c)
    if w[0] <= 0:
        raise Singular("modular operator is not invertible")
    inv_sqrt = realify_matrix((V * w ** -0.5) @ V.conj().T)
    j = s @ inv_sqrt
    return ModularData(
        K=K,
        s=Operator(space, s, "conjugate"),
        j=Operator(space, j, "conjugate"),
        delta=Operator(space, realify_matrix(delta_c), "complex"),
        delta_eigvals=w,
        delta_eigvecs=V,
    )


def tomita(K):
    """Modular data of a standard subspace.

    Raises
    ------
    NotStandard
        If ``K /\\ iK != 0`` or ``K + iK`` is not the whole space.
    """
    cls = classify_subspace(K)
    if not cls.is_standard:
        raise NotStandard(cls)
    F = K.frame
    JF = K.space.Jc @ F
    G = np.hstack([F, JF])
    s = np.hstack([F, -JF]) @ np.linalg.inv(G)
    return _modular_from_tomita(K, s)


def tomita_pair(E, F):
    """The operator ``e + f -> e - f`` of a standard pair."""
    pc = classify_pair(E, F)
    if not pc.standard:
        raise NotStandardPair(
            f"(E, F) is not a standard pair: dim(E /\\ F) = {pc.dim_meet}, "
            f"codim(E \\/ F) = {pc.codim_join}")
    G = np.hstack([E.frame, F.frame])
    s = np.hstack([E.frame, -F.frame]) @ np.linalg.inv(G)
    return Operator(E.space, s)


def graph_norm_residual(E, F, s, rng, samples=100):
    """Max relative violation of ``|e+f|^2 + |s(e+f)|^2 = 2(|e|^2 + |f|^2)``."""
    worst = 0.0
    for _ in range(samples):
        e = E.frame @ rng.standard_normal(E.r)
        f = F.frame @ rng.standard_normal(F.r)
        lhs = np.sum((e + f) ** 2) + np.sum((s @ (e + f)) ** 2)
        rhs = 2 * (e @ e + f @ f)
        worst = max(worst, abs(lhs - rhs) / rhs)
    return worst


def polar(A):
    """Polar decomposition ``A = u |A|`` of an invertible real-linear operator.

    Returns ``(u, positive_part)`` as :class:`Operator` values.  When ``A`` is
    an involution the relations ``u^2 = 1`` and ``u |A| u = |A|^{-1}`` are
    checked.
    """
    M = A.A
    space = A.space
    AtA = M.T @ M
    if linearity(AtA, space.Jc) == "complex":
        C = complexify_matrix(AtA)
        C = (C + C.conj().T) / 2
        w, V = np.linalg.eigh(C)
        if w[0] <= 1e-14 * w[-1]:
            raise Singular("operator is singular")
        P = realify_matrix((V * np.sqrt(w)) @ V.conj().T)
        Pinv = realify_matrix((V / np.sqrt(w)) @ V.conj().T)
    else:
        w, V = np.linalg.eigh((AtA + AtA.T) / 2)
        if w[0] <= 1e-14 * w[-1]:
            raise Singular("operator is singular")
        P = (V * np.sqrt(w)) @ V.T
        Pinv = (V / np.sqrt(w)) @ V.T
    u = M @ Pinv
    I = np.eye(space.n)
    if np.linalg.norm(M @ M - I, 2) <= 1e-8 * max(1.0, np.linalg.norm(M, 2) ** 2):
        scale = np.linalg.norm(P, 2) * np.linalg.norm(Pinv, 2)
        assert np.linalg.norm(u @ u - I, 2) <= 1e-7 * scale
        assert np.linalg.norm(u @ P @ u - Pinv, 2) <= 1e-7 * scale * np.linalg.norm(Pinv, 2)
    return Operator(space, u), Operator(space, P)


def angle_operator(md):
    """Theta with ``cos Theta = |delta - 1| (delta + 1)^{-1}``, spectrum in [0, pi/2]."""
    return md.delta_function(lambda w: np.arccos(np.abs(w - 1) / (w + 1)))


def angle_projection(md, lo, hi, closed_low=True, closed_high=True):
    """Spectral projection of Theta onto the interval between lo and hi."""
    def chi(w):
        th = np.arccos(np.abs(w - 1) / (w + 1))
        lower = th >= lo if closed_low else th > lo
        upper = th <= hi if closed_high else th < hi
        return (lower & upper).astype(float)
    return md.delta_function(chi)


def kernel_j_plus_I(j):
    """The -1 eigenspace of a conjugate-linear involution."""
    A = j.A
    I = np.eye(j.space.n)
    if np.linalg.norm(A @ A - I, 2) > 1e-8:
        raise NotInvolution("j^2 != 1")
    return span(j.space, null_space(A + I, rtol=1e-9))


@dataclass(frozen=True)
class SpectralFlags:
    lambda_min: float
    lambda_max: float
    dist_of_1_to_spectrum: float
    note: str = ("finite-dimensional surrogate: exact spectral membership of "
                 "0 or 1 only has meaning for the sequence models")


def spectral_flags(md):
    lam = md.delta_eigvals
    return SpectralFlags(float(lam.min()), float(lam.max()),
                         float(np.min(np.abs(lam - 1))))


# -- the two-angle bound --------------------------------------------------------

def _golden_max(f, a, b, tol=1e-9):
    g = (np.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return max(fc, fd)


def _fiber_sup(H, L):
    """sup |<h, k>_R| over unit h in span(H), k in span(L).

    For 2-dimensional fibers the maximum over ``k`` is closed-form for a fixed
    direction angle of ``h``; the remaining angle is found by a grid scan
    refined with golden-section search.  Larger fibers use the SVD.
    """
    M = H.T @ L
    if M.size == 0:
        return 0.0
    if M.shape[0] != 2:
        return float(np.linalg.svd(M, compute_uv=False)[0])

    def f(a):
        return float(np.linalg.norm(np.array([np.cos(a), np.sin(a)]) @ M))

    grid = np.linspace(0, np.pi, 65)
    vals = [f(a) for a in grid]
    i = int(np.argmax(vals))
    return _golden_max(f, grid[max(i - 1, 0)], grid[min(i + 1, 64)])


@dataclass(frozen=True)
class TwoAngleReport:
    sup_re_pairing: float
    min_graph_ratio: float
    fibers: tuple            # (|log delta| value, sup on that fiber)
    svd_sup: float           # global sup from the SVD, for cross-checking
    kernel_dim: int

    SUP_BOUND = np.sqrt(2) / 2
    RATIO_BOUND = (np.sqrt(2) - 1) / np.sqrt(2)


def two_angle_report(K, md=None, group_tol=1e-7):
    """Bounds on the angle between K and Ker(j + 1).

    The space is split by the spectral projections of ``|log delta|``
    (both subspaces are reduced by them) and the supremum of
    ``|Re<h, k>|`` is maximised fiber by fiber.  The minimum of
    ``|h + k|^2 / (|h|^2 + |k|^2)`` equals ``1 - sup``.
    """
    md = md or tomita(K)
    L = kernel_j_plus_I(md.j)
    lam, V = md.delta_eigvals, md.delta_eigvecs
    key = np.abs(np.log(lam))
    order = np.argsort(key, kind="stable")
    groups, cur = [], [order[0]]
    for a, b in zip(order[:-1], order[1:]):
        if key[b] - key[a] <= group_tol * max(1.0, key[a]):
            cur.append(b)
        else:
            groups.append(cur)
            cur = [b]
    groups.append(cur)

    fibers = []
    for g in groups:
        P = realify_matrix(V[:, g] @ V[:, g].conj().T)
        H = orthonormal_basis(P @ K.frame)
        Lf = orthonormal_basis(P @ L.frame)
        fibers.append((float(np.mean(key[g])), _fiber_sup(H, Lf)))
    sup = max(v for _, v in fibers)
    svd_sup = float(np.linalg.svd(K.frame.T @ L.frame, compute_uv=False)[0])
    return TwoAngleReport(sup, 1.0 - sup, tuple(fibers), svd_sup, L.r)


def commutant_via_j(md):
    """j K, which equals K' for a standard K."""
    return md.j(md.K)


def fiber_modular_closed_form(theta):
    """Closed-form delta eigenvalues of the angle fiber: (tan^2, cot^2) of theta/2."""
    t = np.tan(theta / 2) ** 2
    return np.array([t, 1 / t])


__all__ = [
    "Operator", "ModularData", "NotStandard", "NotStandardPair", "Singular",
    "NotInvolution", "tomita", "tomita_pair", "polar", "angle_operator",
    "angle_projection", "kernel_j_plus_I", "spectral_flags", "two_angle_report",
    "TwoAngleReport", "linearity", "graph_norm_residual", "commutant_via_j",
    "fiber_modular_closed_form",
]
