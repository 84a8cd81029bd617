"""Truncated symmetric Fock space over C^d.

The one-particle space is C^d with the inner product conjugate-linear in
the first slot.  Basis vectors of the Fock space are occupation multi-indices
``n`` with ``|n| <= N``, ordered by total number and then lexicographically
(largest first occupation first).

Coherent vectors ``e^f`` have components ``prod f_i^{n_i} / sqrt(n_i!)``;
the Weyl unitaries are ``W(h) = exp(i Phi(h))`` with the field
``Phi(h) = (a(h) + a^dagger(h)) / sqrt(2)``, ``a(h)`` conjugate-linear in h.

Truncation errors are controlled by exact tails of displaced number states,
computed from generalized Laguerre polynomials, plus a floating-point floor.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import eval_genlaguerre, gammainc, gammaln

EPS = np.finfo(float).eps
DEFAULT_RADIUS = 1.5


class RadiusExceeded(ValueError):
    pass


# -- tails ---------------------------------------------------------------------

def tail_bound(N, r):
    """tau(N, r) = sum_{n > N} r^{2n} / n!, the squared norm a coherent vector loses."""
    x = float(r) ** 2
    if x == 0.0:
        return 0.0
    return float(math.exp(x) * gammainc(N + 1, x))


def displaced_tail(m, N, alpha, extra=80):
    """Squared norm beyond N of the number state |m> displaced by |alpha|.

    Uses |<n|D(alpha)|m>|^2 = e^{-x} (m!/n!) x^{n-m} L_m^{(n-m)}(x)^2 with
    x = |alpha|^2; for m = 0 this is e^{-x} tau(N, |alpha|).
    """
    x = float(abs(alpha)) ** 2
    if x == 0.0:
        return 0.0 if m <= N else 1.0
    n = np.arange(N + 1, N + 1 + extra)
    k = n - m
    logw = -x + gammaln(m + 1) - gammaln(n + 1) + k * math.log(x)
    L = eval_genlaguerre(m, k, x)
    return float(np.sum(np.exp(logw) * L ** 2))


def sector_tail(N, r, sector):
    """Worst squared tail beyond N over number states |m>, m <= sector, displaced by r/sqrt(2)."""
    return max(displaced_tail(m, N, r / math.sqrt(2.0)) for m in range(sector + 1))


# -- the space ---------------------------------------------------------------------

def graded_lex_basis(d, N):
    out = []
    for total in range(N + 1):
        level = [c for c in itertools.product(range(total, -1, -1), repeat=d) if sum(c) == total]
        out.extend(sorted(level, reverse=True))
    return out


@dataclass(frozen=True, eq=False)
class TruncatedFock:
    d: int
    N: int
    radius: float = DEFAULT_RADIUS

    @cached_property
    def basis(self):
        return graded_lex_basis(self.d, self.N)

    @cached_property
    def index(self):
        return {n: i for i, n in enumerate(self.basis)}

    @property
    def dim(self):
        return len(self.basis)

    @cached_property
    def number(self):
        return np.array([sum(n) for n in self.basis])

    def sector(self, m):
        """Indices of the basis vectors with at most m particles."""
        return np.flatnonzero(self.number <= m)

    @cached_property
    def annihilators(self):
        ops = []
        for i in range(self.d):
            A = np.zeros((self.dim, self.dim))
            for col, n in enumerate(self.basis):
                if n[i]:
                    lower = n[:i] + (n[i] - 1,) + n[i + 1:]
                    A[self.index[lower], col] = math.sqrt(n[i])
            ops.append(A)
        return ops

    def vacuum(self):
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return FockVector(self, v, 0.0)

    def check_radius(self, r, what="vector"):
        if r > self.radius + 1e-12:
            raise RadiusExceeded(f"{what} norm {r:.4g} exceeds the configured radius {self.radius}")


@dataclass(frozen=True, eq=False)
class FockVector:
    fock: TruncatedFock
    coeffs: np.ndarray
    tail: float = 0.0          # squared norm lost to the cutoff, when known

    def inner(self, other):
        return complex(np.vdot(self.coeffs, other.coeffs))

    def norm(self):
        return float(np.linalg.norm(self.coeffs))


@dataclass(frozen=True, eq=False)
class FockOperator:
    fock: TruncatedFock
    matrix: np.ndarray
    unitarity_defect: float | None = None

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            return FockOperator(self.fock, self.matrix @ other.matrix)
        if isinstance(other, FockVector):
            return FockVector(self.fock, self.matrix @ other.coeffs)
        return NotImplemented


def _one_particle(h, d):
    h = np.asarray(h, dtype=complex).reshape(-1)
    if h.size != d:
        raise ValueError(f"one-particle vector has length {h.size}, expected {d}")
    return h


# -- coherent vectors and Weyl operators ------------------------------------------

def coherent(f, fock):
    """e^f truncated at N particles, with tail tau(N, |f|)."""
    f = _one_particle(f, fock.d)
    r = float(np.linalg.norm(f))
    fock.check_radius(r)
    logfact = np.array([[gammaln(k + 1) for k in n] for n in fock.basis])
    occ = np.array(fock.basis)
    with np.errstate(divide="ignore"):
        c = np.prod(np.where(occ > 0, f[None, :] ** occ, 1.0), axis=1)
    c = c * np.exp(-0.5 * logfact.sum(axis=1))
    return FockVector(fock, c.astype(complex), tail_bound(fock.N, r))


def annihilation(h, fock):
    """a(h) = sum conj(h_i) a_i, conjugate-linear in h."""
    h = _one_particle(h, fock.d)
    return sum(np.conj(hi) * A for hi, A in zip(h, fock.annihilators))


def field_operator(h, fock):
    a = annihilation(h, fock)
    return (a + a.conj().T) / math.sqrt(2.0)


def weyl(h, fock):
    """W(h) = exp(i Phi(h)) from the spectral decomposition of the truncated field."""
    h = _one_particle(h, fock.d)
    fock.check_radius(float(np.linalg.norm(h)))
    Phi = field_operator(h, fock)
    w, V = np.linalg.eigh(Phi)
    W = (V * np.exp(1j * w)) @ V.conj().T
    defect = float(np.linalg.norm(W.conj().T @ W - np.eye(fock.dim), 2))
    return FockOperator(fock, W, defect)


def field_self_test(h, fock):
    """<e^0, Phi(h)^2 e^0> - |h|^2 / 2; zero for the first-slot-conjugate convention."""
    Phi = field_operator(h, fock)
    v = Phi[:, 0]
    return float(abs(np.vdot(v, v) - 0.5 * np.linalg.norm(h) ** 2))


def truncation_tolerance(fock, r, sector, operators=1):
    """Calibrated tolerance for defects of products of Weyl operators on a sector.

    Each of ``operators`` Weyl factors with argument norm at most ``r`` can
    lose at most the amplitude sqrt(sector tail) across the cutoff; the
    floating-point floor is eps times dimension per factor.
    """
    tail = sector_tail(fock.N, r, sector)
    return operators * (math.sqrt(tail) + 16 * EPS * fock.dim)


def vacuum_amplitude(h, fock):
    """(computed <e^0, W(h) e^0>, exact e^{-|h|^2/4}, calibrated tolerance)."""
    h = _one_particle(h, fock.d)
    W = weyl(h, fock)
    exact = math.exp(-0.25 * np.linalg.norm(h) ** 2)
    r = float(np.linalg.norm(h))
    tol = tail_bound(fock.N, r / math.sqrt(2.0)) + 16 * EPS * fock.dim
    return complex(W.matrix[0, 0]), exact, tol


def vacuum_coherent_defect(h, fock):
    """|| W(h) e^0 - e^{-|h|^2/4} e^{(i/sqrt 2) h} ||."""
    h = _one_particle(h, fock.d)
    W = weyl(h, fock)
    target = coherent(1j * h / math.sqrt(2.0), fock).coeffs * math.exp(-0.25 * np.linalg.norm(h) ** 2)
    return float(np.linalg.norm(W.matrix[:, 0] - target))


# -- CCR and commutants --------------------------------------------------------------

def imag_inner(h, k):
    """Im<h, k> with the first slot conjugated."""
    return float(np.imag(np.vdot(h, k)))


def sector_norm(A, fock, sector):
    """Operator norm of A restricted to the low-particle sector."""
    cols = fock.sector(sector)
    return float(np.linalg.norm(A[:, cols], 2))


@dataclass(frozen=True)
class DefectReport:
    defect: float
    tolerance: float
    sector: int
    phase: complex | None = None
    note: str = ""


def ccr_defect(h, k, fock, sector=None, report=False):
    """|| W(h)W(k) - e^{-(i/2) Im<h,k>} W(h+k) || on particle numbers <= sector."""
    h = _one_particle(h, fock.d)
    k = _one_particle(k, fock.d)
    r = float(np.linalg.norm(h) + np.linalg.norm(k))
    fock.check_radius(r, "|h| + |k|")
    sector = fock.N // 2 if sector is None else sector
    if not np.any(h) or not np.any(k):
        d = 0.0
        phase = 1.0 + 0.0j
    else:
        phase = np.exp(-0.5j * imag_inner(h, k))
        D = weyl(h, fock).matrix @ weyl(k, fock).matrix - phase * weyl(h + k, fock).matrix
        d = sector_norm(D, fock, sector)
    if not report:
        return d
    tol = truncation_tolerance(fock, r, sector, operators=3)
    return DefectReport(d, tol, sector, complex(phase), f"sector |n| <= {sector} of N = {fock.N}")


def commutator_norm(h, k, fock, sector=None):
    sector = fock.N // 2 if sector is None else sector
    Wh, Wk = weyl(h, fock).matrix, weyl(k, fock).matrix
    return sector_norm(Wh @ Wk - Wk @ Wh, fock, sector)


def commutator_prediction(h, k, fock, sector=None):
    """|2 sin(Im<h,k>/2)| times the sector norm of W(h+k)."""
    sector = fock.N // 2 if sector is None else sector
    return abs(2 * math.sin(0.5 * imag_inner(h, k))) * sector_norm(weyl(h + k, fock).matrix, fock, sector)


def commutant_defect(K, samples, fock, seed=0, sector=None, scale=None):
    """max || [W(h), W(k)] || on the sector over sampled h in K, k in K'.

    Samples are random unit combinations of frames of K and its symplectic
    complement, scaled so that |h| + |k| stays inside the radius.
    """
    from .hilbert import complexify_vector, symplectic_complement
    if K.space.d != fock.d:
        raise ValueError("K does not live in the one-particle space")
    sector = fock.N // 2 if sector is None else sector
    Kp = symplectic_complement(K)
    rng = np.random.default_rng(seed)
    scale = 0.5 * fock.radius if scale is None else scale
    worst = 0.0
    for _ in range(samples):
        if K.r == 0 or Kp.r == 0:
            break
        x = K.frame @ rng.standard_normal(K.r)
        y = Kp.frame @ rng.standard_normal(Kp.r)
        h = complexify_vector(x / np.linalg.norm(x)) * scale * rng.uniform(0.2, 1.0)
        k = complexify_vector(y / np.linalg.norm(y)) * scale * rng.uniform(0.2, 1.0)
        worst = max(worst, commutator_norm(h, k, fock, sector))
    return worst


# -- second quantization ---------------------------------------------------------------

def _poly_mul(p, q, N):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            if sum(e) <= N:
                out[e] = out.get(e, 0) + c1 * c2
    return out


def gamma(A, fock):
    """Gamma(A) = sum over n of A^{(x) n} restricted to symmetric tensors.

    Works on monomials: ``|m>`` corresponds to ``prod x_j^{m_j} / sqrt(m_j!)``
    and Gamma(A) substitutes ``x_j -> sum_i A_ij x_i``.
    """
    A = np.asarray(A, dtype=complex)
    d, N = fock.d, fock.N
    opnorm = float(np.linalg.norm(A, 2))
    unit = [tuple(int(i == j) for i in range(d)) for j in range(d)]
    lin = [{unit[i]: A[i, j] for i in range(d) if A[i, j] != 0} for j in range(d)]
    powers = []
    for j in range(d):
        pw = [{(0,) * d: 1.0}]
        for _ in range(N):
            pw.append(_poly_mul(pw[-1], lin[j], N))
        powers.append(pw)
    G = np.zeros((fock.dim, fock.dim), dtype=complex)
    for col, m in enumerate(fock.basis):
        poly = {(0,) * d: 1.0}
        for j, mj in enumerate(m):
            if mj:
                poly = _poly_mul(poly, powers[j][mj], N)
        norm_m = math.exp(-0.5 * sum(gammaln(x + 1) for x in m))
        for e, c in poly.items():
            if sum(e) == sum(m):
                G[fock.index[e], col] = c * norm_m * math.exp(0.5 * sum(gammaln(x + 1) for x in e))
    return FockOperator(fock, G, None if opnorm <= 1 + 1e-12 else opnorm)


def gamma_antilinear(B, fock):
    """Second quantization of the conjugate-linear map x -> B conj(x).

    Returns the complex matrix G with Gamma(j) psi = G conj(psi) in the
    occupation basis, which is real.
    """
    return gamma(B, fock)


def number_phase_defect(theta, fock):
    """max | Gamma(e^{i theta}) - e^{i n theta} | over the diagonal, exactly zero in exact arithmetic."""
    G = gamma(np.exp(1j * theta) * np.eye(fock.d), fock).matrix
    target = np.diag(np.exp(1j * theta * fock.number))
    return float(np.max(np.abs(G - target)))
