"""Direct sums of C^2 angle fibers described by an angle sequence.

A model is the (infinite) orthogonal sum of the fiber subspaces
``K(theta_n)``, each with modular spectrum ``{tan^2(theta_n/2),
cot^2(theta_n/2)}`` and angle operator equal to ``theta_n``.  Vectors are
described fiber-wise by coefficient sequences; membership in operator
domains reduces to convergence of weighted series, which is decided on the
sequence descriptors (power laws), never by thresholding partial sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import zeta

from .hilbert import (
    ComplexSpace,
    fiber_subspace,
    fiber_sum_frame,
    orthonormal_basis,
    span,
    symplectic_complement,
)
from .modular import tomita_pair

HALF_PI = np.pi / 2
N_MATERIALIZE = 64


class GoalInfeasible(ValueError):
    def __init__(self, message, trend=None):
        super().__init__(message)
        self.trend = trend


# -- sequence descriptors -------------------------------------------------------
#
# Every descriptor evaluates on integer arrays n >= 1 and exposes
# ``branches()``: a list of (A, p, limit) triples, one per interleaved
# subsequence, meaning "the values behave like A * m**p" (for coefficients)
# or "the values tend to ``limit``" (for angles).  ``None`` means no
# symbolic information.

@dataclass(frozen=True)
class Constant:
    value: float

    def __call__(self, n):
        return np.full(np.shape(n), float(self.value))

    def branches(self):
        return [_Branch(abs(self.value), 0.0, float(self.value), self)]


@dataclass(frozen=True)
class Zero:
    def __call__(self, n):
        return np.zeros(np.shape(n))

    def branches(self):
        return [_Branch(0.0, 0.0, 0.0, self)]


@dataclass(frozen=True)
class PowerLaw:
    """``c * n**(-alpha)``."""

    c: float
    alpha: float

    def __call__(self, n):
        return self.c * np.asarray(n, dtype=float) ** (-self.alpha)

    def branches(self):
        limit = 0.0 if self.alpha > 0 else float(self.c)
        return [_Branch(abs(self.c), -float(self.alpha), limit, self)]


@dataclass(frozen=True)
class ApproachHalfPi:
    """``pi/2 - c * n**(-alpha)``, an angle sequence accumulating at pi/2."""

    c: float
    alpha: float

    def __call__(self, n):
        return HALF_PI - self.c * np.asarray(n, dtype=float) ** (-self.alpha)

    def branches(self):
        return [_Branch(HALF_PI, 0.0, HALF_PI if self.alpha > 0 else HALF_PI - self.c, self)]


@dataclass(frozen=True)
class Table:
    """Finitely many explicit values followed by a tail rule evaluated at n."""

    values: tuple
    tail: object = None

    def __call__(self, n):
        n = np.asarray(n)
        out = np.empty(n.shape, dtype=float)
        head = n <= len(self.values)
        vals = np.asarray(self.values, dtype=float)
        out[head] = vals[n[head] - 1]
        if np.any(~head):
            if self.tail is None:
                raise IndexError("table exhausted and no tail rule declared")
            out[~head] = self.tail(n[~head])
        return out

    def branches(self):
        return None if self.tail is None else self.tail.branches()


@dataclass(frozen=True)
class Interleave:
    """Odd indices follow ``odd`` and even indices follow ``even``.

    Each part is evaluated at its own running index m (n = 2m - 1 or n = 2m).
    """

    odd: object
    even: object

    def __call__(self, n):
        n = np.asarray(n)
        out = np.empty(n.shape, dtype=float)
        o = n % 2 == 1
        out[o] = self.odd((n[o] + 1) // 2)
        out[~o] = self.even(n[~o] // 2)
        return out

    def branches(self):
        a, b = self.odd.branches(), self.even.branches()
        if a is None or b is None:
            return None
        return a + b

    def part(self, i):
        return self.odd if i % 2 == 0 else self.even


@dataclass(frozen=True)
class _Branch:
    A: float
    p: float
    limit: float
    source: object


Descriptor = Union[Constant, Zero, PowerLaw, ApproachHalfPi, Table, Interleave]


def _parts(desc):
    """Flatten a descriptor into its interleaved parts (a list of descriptors)."""
    if isinstance(desc, Interleave):
        return [desc.odd, desc.even]
    if isinstance(desc, Table) and desc.tail is not None:
        return _parts(desc.tail)
    return [desc]


# -- models ---------------------------------------------------------------------

BRANCHES = ("large", "small", "d_large", "d_small")


@dataclass(frozen=True)
class CoefficientSequence:
    """Fiber coefficients ``c_n`` of a vector, each multiplying a unit branch vector.

    ``branch`` names the fiber eigenvector: "large"/"small" for the
    eigenvalues cot^2 / tan^2 of the modular operator, "d_large"/"d_small"
    for the positive part of the polar decomposition of the
    (N, N') Tomita operator.  For interleaved coefficients it may be a pair
    (odd branch, even branch).
    """

    coeffs: object
    branch: object = "large"

    def __post_init__(self):
        for b in self._branch_parts():
            if b not in BRANCHES:
                raise ValueError(f"unknown branch {b!r}")

    def _branch_parts(self):
        return self.branch if isinstance(self.branch, tuple) else (self.branch,)

    def branch_at(self, n):
        b = self._branch_parts()
        return b[0] if len(b) == 1 else b[(n - 1) % 2]

    def __call__(self, n):
        return self.coeffs(n)


@dataclass(frozen=True)
class AngleSequenceModel:
    angles: object
    extension_vectors: tuple = ()
    n_materialize: int = N_MATERIALIZE

    def theta(self, n):
        return self.angles(np.asarray(n))

    def check(self, upto=None):
        n = np.arange(1, (upto or self.n_materialize) + 1)
        th = self.theta(n)
        if np.any(th <= 0) or np.any(th > HALF_PI + 1e-15):
            raise ValueError("angles must lie in (0, pi/2]")
        return True


# -- weights and the series test --------------------------------------------------

@dataclass(frozen=True)
class Weight:
    """Per-fiber quadratic form of an operator evaluated on unit branch vectors.

    ``kind`` is "unit" (the Hilbert norm), "delta" (the modular operator,
    testing the domain of delta^{1/2}), "d" (positive part of the (N, N')
    Tomita operator, testing the domain of d^{1/2}) or "power" with
    ``w_n = n**beta``.
    """

    kind: str = "unit"
    model: AngleSequenceModel | None = None
    beta: float = 0.0

    def values(self, n, branch_of):
        n = np.asarray(n)
        if self.kind == "unit":
            return np.ones(n.shape)
        if self.kind == "power":
            return n.astype(float) ** self.beta
        th = self.model.theta(n)
        br = np.array([branch_of(int(k)) for k in n.ravel()]).reshape(n.shape)
        return _form_value(self.kind, br, th)


def _form_value(kind, branch, th):
    t2 = np.tan(th / 2) ** 2
    q = (1 + np.sin(th)) / (1 - np.sin(th)) if np.all(np.sin(th) < 1) else None
    out = np.empty(np.shape(th))
    for b in BRANCHES:
        m = branch == b
        if not np.any(m):
            continue
        if kind == "delta":
            val = {"large": 1 / t2, "small": t2}.get(b, (t2 + 1 / t2) / 2)
        else:
            if q is None:
                qq = (1 + np.sin(th)) / np.maximum(1 - np.sin(th), np.finfo(float).tiny)
            else:
                qq = q
            val = {"d_large": qq, "d_small": 1 / qq}.get(b, (qq + 1 / qq) / 2)
        out[m] = np.broadcast_to(val, np.shape(th))[m]
    return out


def _form_asymptotic(kind, branch, angle_part):
    """(A, p) with form ~ A m**p along an angle descriptor part, or None."""
    if isinstance(angle_part, Constant):
        val = _form_value(kind, np.array([branch]), np.array([angle_part.value]))[0]
        return val, 0.0
    if isinstance(angle_part, PowerLaw):
        c, a = angle_part.c, angle_part.alpha
        if a == 0:
            return _form_asymptotic(kind, branch, Constant(c))
        if kind == "delta":
            return {"large": (4 / c**2, 2 * a), "small": (c**2 / 4, -2 * a)}.get(
                branch, (2 / c**2, 2 * a))
        return {"d_large": (1.0, 0.0), "d_small": (1.0, 0.0)}.get(branch, (1.0, 0.0))
    if isinstance(angle_part, ApproachHalfPi):
        c, a = angle_part.c, angle_part.alpha
        if a == 0:
            return _form_asymptotic(kind, branch, Constant(HALF_PI - c))
        if kind == "delta":
            return 1.0, 0.0
        return {"d_large": (4 / c**2, 2 * a), "d_small": (c**2 / 4, -2 * a)}.get(
            branch, (2 / c**2, 2 * a))
    if isinstance(angle_part, Table) and angle_part.tail is not None:
        return _form_asymptotic(kind, branch, angle_part.tail)
    return None


def _coeff_asymptotic(part):
    if isinstance(part, Zero):
        return 0.0, 0.0
    if isinstance(part, PowerLaw):
        return abs(part.c), -float(part.alpha)
    if isinstance(part, Constant):
        return abs(part.value), 0.0
    if isinstance(part, Table) and part.tail is not None:
        return _coeff_asymptotic(part.tail)
    return None


@dataclass(frozen=True)
class SeriesVerdict:
    verdict: str                       # "Converges" | "Diverges" | "Inconclusive"
    terms: tuple = ()                  # per-subsequence (A, p) with term ~ A m**p
    reason: str = ""

    def __str__(self):
        return self.verdict


def _aligned_parts(c, w):
    """Pair coefficient, branch and angle parts along a common interleaving."""
    cparts = _parts(c.coeffs)
    angle_parts = _parts(w.model.angles) if w.model is not None else [None]
    k = max(len(cparts), len(angle_parts), len(c._branch_parts()))
    if any(len(x) not in (1, k) for x in (cparts, angle_parts, c._branch_parts())):
        return None
    pick = lambda xs, i: xs[0] if len(xs) == 1 else xs[i]  # noqa: E731
    return [(pick(cparts, i), pick(c._branch_parts(), i), pick(angle_parts, i)) for i in range(k)]


def weighted_sum_test(c, w):
    """Decide convergence of ``sum_n w_n |c_n|^2`` from the descriptors.

    Power law times power law is decided in closed form (a series with
    terms ~ A m**p converges iff p < -1); anything without symbolic data
    gives "Inconclusive".
    """
    parts = _aligned_parts(c, w)
    if parts is None:
        return SeriesVerdict("Inconclusive", reason="incompatible interleavings")
    terms = []
    for cpart, branch, apart in parts:
        ca = _coeff_asymptotic(cpart)
        if ca is None:
            return SeriesVerdict("Inconclusive", reason=f"no asymptotics for {cpart!r}")
        if w.kind == "unit":
            wa = (1.0, 0.0)
        elif w.kind == "power":
            wa = (1.0, float(w.beta))
        else:
            wa = _form_asymptotic(w.kind, branch, apart)
            if wa is None:
                return SeriesVerdict("Inconclusive", reason=f"no asymptotics for {apart!r}")
        A = ca[0] ** 2 * wa[0]
        p = 2 * ca[1] + wa[1]
        terms.append((A, p))
    diverging = [t for t in terms if t[0] > 0 and t[1] >= -1]
    verdict = "Diverges" if diverging else "Converges"
    return SeriesVerdict(verdict, tuple(terms))


def partial_sum(c, w, N):
    """Numerical cross-check: sum_{n <= N} w_n |c_n|^2."""
    n = np.arange(1, N + 1)
    return float(np.sum(w.values(n, c.branch_at) * c(n) ** 2))


def predicted_partial_sum(verdict, N):
    """Leading-order prediction of the partial sum from the symbolic terms.

    Divergent parts with exponent p grow like A m^{p+1}/(p+1) (A log m for
    p = -1); convergent parts contribute A zeta(-p).  Each interleaved part
    runs over m <= N / (number of parts).
    """
    k = len(verdict.terms)
    M = N / k
    total = 0.0
    for A, p in verdict.terms:
        if A == 0:
            continue
        if p > -1:
            total += A * M ** (p + 1) / (p + 1)
        elif p == -1:
            total += A * (math.log(M) + np.euler_gamma)
        else:
            total += A * float(zeta(-p))
    return total


# -- extension construction -----------------------------------------------------

def _angle_trend(model, sizes=(8, 16, 32, 64)):
    out = {}
    for D in sizes:
        th = model.theta(np.arange(1, D + 1))
        out[D] = {"lambda_min": float(np.min(np.tan(th / 2) ** 2)),
                  "dist_1": float(np.min(np.abs(np.tan(th / 2) ** 2 - 1)))}
    return out


def _accumulates(part, target):
    br = part.branches() if hasattr(part, "branches") else None
    if br is None:
        return False
    b = br[0]
    return abs(b.limit - target) < 1e-15 and not isinstance(b.source, Constant)


def _coefficients_for(part, kind):
    """A square-summable power law whose weighted series diverges along ``part``."""
    alpha = part.alpha
    gamma = (1 + alpha) / 2          # 1/2 < gamma <= alpha + 1/2
    return PowerLaw(1.0, gamma)


def construct_extension(model, goal="Standard"):
    """Vectors whose addition to the model subspace gives the requested extension.

    goal "Standard": supported on the modular large branch of fibers with
    angles tending to 0, outside the domain of delta^{1/2}.
    goal "Irreducible": supported on the d-large branch of fibers with angles
    tending to pi/2, outside the domain of d^{1/2}.
    goal "Both": the sum of the two, split by the angle spectral projections
    at pi/4, returned as one interleaved sequence.
    """
    parts = _parts(model.angles)
    to_zero = [i for i, p in enumerate(parts) if isinstance(p, PowerLaw) and _accumulates(p, 0.0)]
    to_half = [i for i, p in enumerate(parts) if isinstance(p, ApproachHalfPi) and _accumulates(p, HALF_PI)]
    trend = _angle_trend(model)

    def build(indices, branch):
        coeffs = [Zero()] * len(parts)
        for i in indices:
            coeffs[i] = _coefficients_for(parts[i], branch)
        if len(parts) == 1:
            return CoefficientSequence(coeffs[0], branch)
        return CoefficientSequence(Interleave(*coeffs), (branch, branch))

    if goal == "Standard":
        if not to_zero:
            raise GoalInfeasible("no angle subsequence tends to 0, so 0 is not in the "
                                 "modular spectrum", trend)
        return build(to_zero[:1], "large")
    if goal == "Irreducible":
        if not to_half:
            raise GoalInfeasible("no angle subsequence tends to pi/2, so 1 is not in the "
                                 "modular spectrum", trend)
        return build(to_half[:1], "d_large")
    if goal == "Both":
        if not to_zero or not to_half:
            raise GoalInfeasible("need angle subsequences tending to both 0 and pi/2", trend)
        if len(parts) != 2:
            raise GoalInfeasible("split-branch construction needs an interleaved model", trend)
        coeffs = [None, None]
        branch = [None, None]
        iz, ih = to_zero[0], to_half[0]
        coeffs[iz], branch[iz] = _coefficients_for(parts[iz], "large"), "large"
        coeffs[ih], branch[ih] = _coefficients_for(parts[ih], "d_large"), "d_large"
        return CoefficientSequence(Interleave(*coeffs), tuple(branch))
    raise ValueError(f"unknown goal {goal!r}")


# -- materialization --------------------------------------------------------------

def _d_eigenvectors(theta):
    """Unit vectors (realified, C^2) of the small and large eigenspaces of d."""
    K = fiber_subspace(theta)
    s = tomita_pair(K, symplectic_complement(K)).A
    w, V = np.linalg.eigh(s.T @ s)
    return orthonormal_basis(V[:, :2])[:, 0], orthonormal_basis(V[:, 2:])[:, 0]


def branch_vector(theta, branch):
    if branch == "small":
        return np.array([1.0, 0.0, 0.0, 0.0])
    if branch == "large":
        return np.array([0.0, 0.0, 1.0, 0.0])
    small, large = _d_eigenvectors(theta)
    return large if branch == "d_large" else small


def extension_vector(model, seq, D):
    n = np.arange(1, D + 1)
    th = model.theta(n)
    c = seq(n)
    y = np.zeros(4 * D)
    for k in range(D):
        if c[k] != 0.0:
            y[4 * k:4 * k + 4] = c[k] * branch_vector(th[k], seq.branch_at(k + 1))
    return y


def materialize(model, D):
    """First D fibers of the model and its extension, as subspaces of C^{2D}."""
    if D > model.n_materialize:
        raise ValueError(f"D={D} exceeds the materialization cap {model.n_materialize}")
    model.check(D)
    space = ComplexSpace(2 * D)
    th = model.theta(np.arange(1, D + 1))
    F = fiber_sum_frame(th)
    M0 = span(space, F)
    if not model.extension_vectors:
        return M0, M0
    Y = np.column_stack([extension_vector(model, e, D) for e in model.extension_vectors])
    return M0, span(space, np.hstack([F, Y]))


# -- type classification ------------------------------------------------------------

@dataclass(frozen=True)
class TypeLabel:
    kind: str                    # "III_lambda" | "lambda_one" | "unknown"
    lam: float | None = None
    inverse_ratio: float | None = None
    ratio_set: tuple = ()
    raw_ratios: tuple = ()
    note: str = ""

    def __str__(self):
        if self.kind == "III_lambda":
            return f"III_{self.lam:.12g}"
        return self.kind


def itpfi_classify(model, n_raw=8):
    """Type of the infinite tensor product built from constant angle fibers.

    Only constant sequences are classified: ``lambda = tan^2(theta/2)``.  Any
    other descriptor is reported as unknown together with the first
    eigenvalue ratios.
    """
    desc = model.angles if isinstance(model, AngleSequenceModel) else model
    if isinstance(desc, PowerLaw) and desc.alpha == 0:
        desc = Constant(desc.c)
    if isinstance(desc, Constant):
        theta = float(desc.value)
        if not 0 < theta <= HALF_PI:
            raise ValueError("angle must lie in (0, pi/2]")
        lam = float(np.tan(theta / 2) ** 2)
        if abs(theta - HALF_PI) < 1e-15:
            return TypeLabel("lambda_one", 1.0, 1.0, (1.0,), note=(
                "modular operator is the identity on every fiber; the fibers "
                "are abelian"))
        return TypeLabel("III_lambda", lam, 1.0 / lam,
                         tuple(lam ** k for k in range(-3, 4)))
    n = np.arange(1, n_raw + 1)
    th = desc(n)
    return TypeLabel("unknown", raw_ratios=tuple(np.tan(th / 2) ** 2),
                     note="non-constant angle sequence: outside the constant-angle result")
