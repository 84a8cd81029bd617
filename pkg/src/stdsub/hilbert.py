"""Real subspaces of finite-dimensional complex Hilbert spaces.

A complex space of dimension ``d`` is handled through its realification
``R^{2d}`` with interleaved coordinates ``(Re z_1, Im z_1, Re z_2, ...)``.
Multiplication by ``i`` is the integer matrix ``Jc`` (2x2 rotation blocks),
the real inner product ``g`` is the Euclidean one and the symplectic form is

    omega(x, y) = g(Jc x, y) = Im <x, y>,

with the complex inner product conjugate-linear in its first slot.

Closed real subspaces are stored as :class:`RealSubspace` values holding an
orthonormal frame; the lattice operations (meet, join, symplectic
complement) act on those frames.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

#: singular values below RANK_RTOL * sigma_max do not count toward rank
RANK_RTOL = 1e-10
#: subspace equality tolerance, operator norm of the projector difference
EQ_TOL = 1e-9
#: absolute threshold on the sine of principal angles used by ``meet``
ANGLE_TOL = 1e-8


class DimensionMismatch(ValueError):
    pass


# -- complex <-> real conversions -------------------------------------------

def realify_vector(z):
    """Map a complex vector (or a stack of column vectors) to R^{2d}."""
    z = np.asarray(z, dtype=complex)
    out = np.empty((2 * z.shape[0],) + z.shape[1:], dtype=float)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


def complexify_vector(x):
    x = np.asarray(x, dtype=float)
    return x[0::2] + 1j * x[1::2]


def realify_matrix(A):
    """Real 2d x 2d representative of a complex-linear matrix."""
    A = np.asarray(A, dtype=complex)
    n, m = A.shape
    R = np.empty((2 * n, 2 * m))
    R[0::2, 0::2] = A.real
    R[0::2, 1::2] = -A.imag
    R[1::2, 0::2] = A.imag
    R[1::2, 1::2] = A.real
    return R


def complexify_matrix(R):
    """Inverse of :func:`realify_matrix`; only meaningful for complex-linear R."""
    R = np.asarray(R, dtype=float)
    return R[0::2, 0::2] + 1j * R[1::2, 0::2]


def conjugation_matrix(d):
    """Real matrix of coordinatewise complex conjugation on C^d."""
    return np.diag(np.tile([1.0, -1.0], d))


def antilinear_matrix(A):
    """Real representative of the conjugate-linear map ``z -> A conj(z)``."""
    return realify_matrix(A) @ conjugation_matrix(np.asarray(A).shape[1])


# -- the ambient space --------------------------------------------------------

@dataclass(frozen=True)
class ComplexSpace:
    """Realified C^d with its complex structure and symplectic form."""

    d: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 0:
            raise ValueError(f"complex dimension must be a non-negative integer, got {self.d}")

    @property
    def n(self):
        """Real dimension."""
        return 2 * self.d

    @property
    def Jc(self):
        J = np.zeros((self.n, self.n))
        for i in range(self.d):
            J[2 * i + 1, 2 * i] = 1.0
            J[2 * i, 2 * i + 1] = -1.0
        return J

    @property
    def omega(self):
        """Gram matrix of the symplectic form, ``omega(x, y) = x @ Omega @ y``."""
        return self.Jc.T

    def sympl(self, x, y):
        return float(np.asarray(x) @ self.omega @ np.asarray(y))

    def inner(self, x, y):
        """Complex inner product of two realified vectors (conjugate-linear first)."""
        return complex(np.vdot(complexify_vector(x), complexify_vector(y)))

    def self_test(self):
        """Assert the structural identities the rest of the package relies on."""
        J = self.Jc
        I = np.eye(self.n)
        assert np.array_equal(J @ J, -I)
        assert np.array_equal(J.T @ J, I)
        Om = self.omega
        assert np.array_equal(Om, -Om.T)
        if self.d:
            assert abs(np.linalg.det(Om)) > 0.5
            rng = np.random.default_rng(0)
            x, y = rng.standard_normal((2, self.n))
            assert abs(self.sympl(x, y) - self.inner(x, y).imag) < 1e-12
            assert abs(float(x @ y) - self.inner(x, y).real) < 1e-12
        return True

    def full(self):
        return RealSubspace(self, np.eye(self.n))

    def zero(self):
        return RealSubspace(self, np.zeros((self.n, 0)))


# -- subspaces ----------------------------------------------------------------

def orthonormal_basis(vectors, rtol=RANK_RTOL):
    """Orthonormal basis of the column span of ``vectors``.

    Uses the SVD, which is deterministic for a given input; the sign of each
    basis vector is then fixed so that its largest-magnitude entry is positive.
    """
    V = np.asarray(vectors, dtype=float)
    if V.ndim != 2:
        raise DimensionMismatch("expected a 2-d array of column vectors")
    if V.shape[1] == 0:
        return np.zeros((V.shape[0], 0))
    U, s, _ = np.linalg.svd(V, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((V.shape[0], 0))
    r = int(np.sum(s > rtol * s[0]))
    Q = U[:, :r]
    idx = np.argmax(np.abs(Q), axis=0)
    signs = np.sign(Q[idx, np.arange(r)])
    signs[signs == 0] = 1.0
    return Q * signs


def null_space(A, rtol=RANK_RTOL, atol=0.0):
    """Orthonormal basis (columns) of the kernel of ``A``."""
    A = np.asarray(A, dtype=float)
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n)
    _, s, Vt = np.linalg.svd(A, full_matrices=True)
    smax = s[0] if s.size else 0.0
    thresh = max(rtol * smax, atol)
    r = int(np.sum(s > thresh))
    return orthonormal_basis(Vt[r:].T) if r < n else np.zeros((n, 0))


@dataclass(frozen=True, eq=False)
class RealSubspace:
    """A real-linear subspace of a :class:`ComplexSpace`.

    ``frame`` is a ``2d x r`` array with g-orthonormal columns.  Equality is
    basis-free: two values are equal when their orthogonal projectors agree
    to :data:`EQ_TOL` in operator norm.
    """

    space: ComplexSpace
    frame: np.ndarray = field(repr=False)

    def __post_init__(self):
        F = np.asarray(self.frame, dtype=float)
        if F.ndim != 2 or F.shape[0] != self.space.n:
            raise DimensionMismatch(
                f"frame must have {self.space.n} rows, got shape {F.shape}")
        F.setflags(write=False)
        object.__setattr__(self, "frame", F)

    @property
    def r(self):
        return self.frame.shape[1]

    @property
    def dim(self):
        return self.r

    @property
    def projector(self):
        return self.frame @ self.frame.T

    def __eq__(self, other):
        if not isinstance(other, RealSubspace):
            return NotImplemented
        return self.space == other.space and distance(self, other) <= EQ_TOL

    __hash__ = None

    def __repr__(self):
        return f"RealSubspace(d={self.space.d}, r={self.r})"

    def contains(self, other, tol=EQ_TOL):
        """True if ``other`` is a subspace of ``self`` (up to ``tol``)."""
        return inclusion_defect(other, self) <= tol

    def apply(self, A):
        """Image of the subspace under a real-linear map on R^{2d}."""
        return span(self.space, np.asarray(A) @ self.frame)

    def to_json(self):
        return json.dumps({"dim_complex": self.space.d,
                           "frame": self.frame.tolist()})

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text) if isinstance(text, str) else text
        space = ComplexSpace(int(obj["dim_complex"]))
        frame = np.asarray(obj["frame"], dtype=float).reshape(space.n, -1)
        return span(space, frame)


def span(space, vectors):
    """Real-linear span.

    ``vectors`` is either a list of vectors in R^{2d} or a 2-d array whose
    columns are the generators.
    """
    if isinstance(vectors, (list, tuple)):
        V = (np.column_stack([np.asarray(v, dtype=float) for v in vectors])
             if len(vectors) else np.zeros((space.n, 0)))
    else:
        V = np.asarray(vectors, dtype=float)
        if V.ndim == 1:
            V = V[:, None]
    if V.ndim != 2 or V.shape[0] != space.n:
        raise DimensionMismatch(f"vectors must live in R^{space.n}, got shape {V.shape}")
    return RealSubspace(space, orthonormal_basis(V))


def _same_space(E, F):
    if E.space != F.space:
        raise DimensionMismatch("subspaces live in different ambient spaces")


def distance(E, F):
    """Operator norm of the difference of the orthogonal projectors."""
    _same_space(E, F)
    if E.r == 0 and F.r == 0:
        return 0.0
    return float(np.linalg.norm(E.projector - F.projector, 2))


def inclusion_defect(E, F):
    """Largest sine of the angle between a unit vector of E and F (0 iff E <= F)."""
    _same_space(E, F)
    if E.r == 0:
        return 0.0
    R = E.frame - F.frame @ (F.frame.T @ E.frame)
    return float(np.linalg.norm(R, 2))


def principal_angles(E, F):
    """Principal angles (ascending) between E and F.

    Cosines come from the SVD of the cross-Gram matrix and sines from the
    residual of the smaller subspace; ``arctan2`` keeps both ends accurate.
    """
    _same_space(E, F)
    k = min(E.r, F.r)
    if k == 0:
        return np.zeros(0)
    A, B = (E, F) if E.r <= F.r else (F, E)
    cos = np.linalg.svd(A.frame.T @ B.frame, compute_uv=False)[:k]
    R = A.frame - B.frame @ (B.frame.T @ A.frame)
    sin = np.sort(np.linalg.svd(R, compute_uv=False))[:k]
    return np.arctan2(sin, cos)


def meet(E, F, tol=ANGLE_TOL):
    """Intersection E /\\ F.

    The directions of E whose distance to F (sine of the principal angle)
    is at most ``tol`` span the intersection.
    """
    _same_space(E, F)
    if E.r == 0 or F.r == 0:
        return E.space.zero()
    if E.r > F.r:
        E, F = F, E
    R = E.frame - F.frame @ (F.frame.T @ E.frame)
    _, s, Vt = np.linalg.svd(R, full_matrices=True)
    s_full = np.zeros(E.r)
    s_full[:s.size] = s
    coeffs = Vt[s_full <= tol].T
    if coeffs.shape[1] == 0:
        return E.space.zero()
    return span(E.space, E.frame @ coeffs)


def join(E, F):
    """Real-linear span E \\/ F."""
    _same_space(E, F)
    return span(E.space, np.hstack([E.frame, F.frame]))


def orthogonal_complement(K):
    """g-orthogonal complement in R^{2d}."""
    if K.r == 0:
        return K.space.full()
    return RealSubspace(K.space, null_space(K.frame.T))


def relative_complement(K, inside):
    """g-orthogonal complement of ``K`` within ``inside``."""
    if K.r == 0:
        return inside
    M = inside.frame - K.frame @ (K.frame.T @ inside.frame)
    return span(inside.space, M)


def times_i(K):
    """The subspace iK."""
    return RealSubspace(K.space, K.space.Jc @ K.frame)


def symplectic_complement(K):
    """K' = {y : omega(x, y) = 0 for all x in K} = Jc (K^perp)."""
    perp = orthogonal_complement(K)
    return RealSubspace(K.space, K.space.Jc @ perp.frame)


def symplectic_complement_bruteforce(K):
    """K' as the null space of the omega-constraints, for cross-checking."""
    if K.r == 0:
        return K.space.full()
    return span(K.space, null_space(K.frame.T @ K.space.omega))


# -- classification -----------------------------------------------------------

@dataclass(frozen=True)
class SubspaceClass:
    is_standard: bool
    is_factor: bool
    dim_complex_part: int      # real dimension of K /\ iK
    dim_cyclic_defect: int     # real codimension of K + iK
    dim_center: int            # real dimension of K /\ K'
    codim_center_join: int     # real codimension of K \/ K'


def classify_subspace(K):
    """Standardness and factoriality flags of ``K``.

    In finite dimension "dense" means "everything", so ``K`` is standard
    when ``K /\\ iK = 0`` and ``K + iK`` is the whole space.
    """
    n = K.space.n
    iK = times_i(K)
    cpart = meet(K, iK).r
    cdef = n - join(K, iK).r
    Kp = symplectic_complement(K)
    center = meet(K, Kp).r
    cjoin = n - join(K, Kp).r
    return SubspaceClass(
        is_standard=(cpart == 0 and cdef == 0),
        is_factor=(center == 0 and cjoin == 0),
        dim_complex_part=cpart,
        dim_cyclic_defect=cdef,
        dim_center=center,
        codim_center_join=cjoin,
    )


@dataclass(frozen=True)
class PairClass:
    standard: bool
    strongly_standard: bool
    dim_meet: int
    codim_join: int
    note: str = ("finite dimension: E + F equals E \\/ F, so every standard "
                 "pair is strongly standard")


def classify_pair(E, F):
    _same_space(E, F)
    m = meet(E, F).r
    cj = E.space.n - join(E, F).r
    std = m == 0 and cj == 0
    return PairClass(standard=std, strongly_standard=std, dim_meet=m, codim_join=cj)


def canonical_parts(M):
    """Split ``M`` into its complex part ``M /\\ iM`` and the orthogonal residual."""
    cpart = meet(M, times_i(M))
    return cpart, relative_complement(cpart, M)


# -- generators ---------------------------------------------------------------

def fiber_vectors(theta):
    """The two real generators of the C^2 fiber subspace with angle ``theta``.

    ``y+ = (cos t/2, sin t/2)`` and ``y- = (i cos t/2, -i sin t/2)`` in complex
    coordinates, returned realified as the columns of a 4 x 2 array.
    """
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, 0.0], [0.0, c], [s, 0.0], [0.0, -s]])


def fiber_subspace(theta):
    return span(ComplexSpace(2), fiber_vectors(theta))


def fiber_sum_frame(thetas):
    """Block-diagonal realified generators of the direct sum of angle fibers."""
    thetas = list(thetas)
    F = np.zeros((4 * len(thetas), 2 * len(thetas)))
    for n, t in enumerate(thetas):
        F[4 * n:4 * n + 4, 2 * n:2 * n + 2] = fiber_vectors(t)
    return F


def random_unitary(d, rng):
    """Haar-random unitary from a seeded generator (QR with phase fix)."""
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_standard(space, rng_seed, angle_range=(0.1, np.pi / 2)):
    """A random standard subspace of ``space``, deterministic in the seed.

    Built as a direct sum of ``d // 2`` angle fibers with sampled angles
    (plus the real line when ``d`` is odd, whose modular operator is trivial),
    then moved by a random unitary.
    """
    lo, hi = angle_range
    if not (0 < lo <= hi <= np.pi / 2):
        raise ValueError("angle_range must lie in (0, pi/2]")
    rng = np.random.default_rng(rng_seed)
    d = space.d
    thetas = rng.uniform(lo, hi, size=d // 2)
    F = np.zeros((space.n, d))
    F[:4 * (d // 2), :2 * (d // 2)] = fiber_sum_frame(thetas)
    if d % 2:
        F[space.n - 2, d - 1] = 1.0
    U = realify_matrix(random_unitary(d, rng))
    return span(space, U @ F)


def random_subspace(space, rng, r=None):
    """Uniformly random real subspace of real dimension ``r``."""
    if r is None:
        r = int(rng.integers(0, space.n + 1))
    return span(space, rng.standard_normal((space.n, r))) if r else space.zero()
