"""Subspace calculus on complex matrices.

A MatrixSubspace is a linear subspace of M_n(C) carried by a Hilbert-Schmidt
orthonormal basis, so membership, projection, and span arithmetic reduce to
flat numpy linear algebra. The algebra helpers (multiplication tensor, unit,
center) power the Wedderburn block count used all over the test surface.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotAnAlgebra, NotUnital

DEFAULT_TOL = 1e-9


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """trace(a* b); conjugate-linear in the first argument."""
    return complex(np.vdot(a, b))


def hs_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def op_norm(m: np.ndarray) -> float:
    """Largest singular value, via the Hermitian spectrum of m* m."""
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return 0.0
    w = np.linalg.eigvalsh(dagger(m) @ m)
    return float(np.sqrt(max(w[-1], 0.0)))


def is_psd(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Hermitian within tol and spectrum above -tol * op_norm(m)."""
    m = np.asarray(m, dtype=complex)
    if op_norm(m - dagger(m)) > tol:
        return False
    herm = (m + dagger(m)) / 2
    w = np.linalg.eigvalsh(herm)
    return bool(w[0] >= -tol * max(op_norm(m), 1.0))


@dataclass(frozen=True)
class MatrixSubspace:
    """A subspace of M_n(C) with an HS-orthonormal basis, stacked (k, n, n)."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self) -> None:
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 3 or b.shape[1:] != (self.ambient_dim, self.ambient_dim):
            raise DimensionMismatch(
                f"basis stack {b.shape} does not match ambient dim {self.ambient_dim}"
            )
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def flat(self) -> np.ndarray:
        return self.basis.reshape(self.dim, self.ambient_dim * self.ambient_dim)

    def coords(self, m: np.ndarray) -> np.ndarray:
        return self.flat.conj() @ np.asarray(m, dtype=complex).ravel()

    def from_coords(self, c) -> np.ndarray:
        n = self.ambient_dim
        if self.dim == 0:
            return np.zeros((n, n), dtype=complex)
        return np.tensordot(np.asarray(c, dtype=complex), self.basis, axes=(0, 0))

    def project(self, m: np.ndarray) -> np.ndarray:
        return self.from_coords(self.coords(m))

    def residual(self, m: np.ndarray) -> float:
        return hs_norm(np.asarray(m, dtype=complex) - self.project(m))

    def contains(self, m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
        return self.residual(m) <= tol * max(1.0, hs_norm(m))

    def basis_list(self) -> list[np.ndarray]:
        return [self.basis[i] for i in range(self.dim)]


def orthonormalize(mats, ambient_dim: int | None = None, tol: float = DEFAULT_TOL) -> MatrixSubspace:
    """HS-orthonormal basis of span(mats); near-dependent directions are dropped.

    The cut is at tol times the largest input norm, so scaling the whole input
    does not change which directions survive.
    """
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if ambient_dim is None:
        if not mats:
            raise DimensionMismatch("empty input needs an explicit ambient_dim")
        ambient_dim = mats[0].shape[0]
    for m in mats:
        if m.shape != (ambient_dim, ambient_dim):
            raise DimensionMismatch(f"matrix shape {m.shape} in ambient dim {ambient_dim}")
        if not np.all(np.isfinite(m)):
            raise DimensionMismatch("non-finite entries")
    if not mats:
        return MatrixSubspace(ambient_dim, np.zeros((0, ambient_dim, ambient_dim), dtype=complex))
    stack = np.stack(mats).reshape(len(mats), -1)
    scale = max(np.linalg.norm(stack, axis=1).max(), 0.0)
    if scale == 0.0:
        return MatrixSubspace(ambient_dim, np.zeros((0, ambient_dim, ambient_dim), dtype=complex))
    _, sv, vh = np.linalg.svd(stack, full_matrices=False)
    keep = sv > tol * scale
    basis = vh[keep].reshape(-1, ambient_dim, ambient_dim)
    return MatrixSubspace(ambient_dim, basis)


def product_span(s: MatrixSubspace, t: MatrixSubspace, tol: float = DEFAULT_TOL) -> MatrixSubspace:
    """Span of all pairwise products of basis elements."""
    if s.ambient_dim != t.ambient_dim:
        raise DimensionMismatch("product of subspaces in different ambients")
    if s.dim == 0 or t.dim == 0:
        return MatrixSubspace(s.ambient_dim, np.zeros((0, s.ambient_dim, s.ambient_dim), dtype=complex))
    prods = np.einsum("aij,bjk->abik", s.basis, t.basis).reshape(-1, s.ambient_dim, s.ambient_dim)
    return orthonormalize(list(prods), ambient_dim=s.ambient_dim, tol=tol)


def adjoint_span(s: MatrixSubspace) -> MatrixSubspace:
    return MatrixSubspace(s.ambient_dim, np.conj(np.swapaxes(s.basis, 1, 2)))


def span_union(subspaces, ambient_dim: int | None = None, tol: float = DEFAULT_TOL) -> MatrixSubspace:
    mats: list[np.ndarray] = []
    for s in subspaces:
        mats.extend(s.basis_list())
        ambient_dim = s.ambient_dim
    return orthonormalize(mats, ambient_dim=ambient_dim, tol=tol)


def subspace_leq(s: MatrixSubspace, t: MatrixSubspace, tol: float = DEFAULT_TOL) -> bool:
    return all(t.contains(m, tol) for m in s.basis_list())


def subspace_equal(s: MatrixSubspace, t: MatrixSubspace, tol: float = DEFAULT_TOL) -> bool:
    return s.dim == t.dim and subspace_leq(s, t, tol) and subspace_leq(t, s, tol)


# algebra structure on a subspace

def multiplication_tensor(a: MatrixSubspace, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Structure constants m[i, j, :] = coords(b_i @ b_j); NotAnAlgebra if open.

    Closure is judged against tol * max(1, |product|) per pair.
    """
    k, n = a.dim, a.ambient_dim
    if k == 0:
        return np.zeros((0, 0, 0), dtype=complex)
    prods = np.einsum("aij,bjk->abik", a.basis, a.basis).reshape(k * k, n * n)
    coords = prods @ a.flat.conj().T
    recon = coords @ a.flat
    res = np.linalg.norm(prods - recon, axis=1)
    bound = tol * np.maximum(1.0, np.linalg.norm(prods, axis=1))
    if np.any(res > bound):
        i = int(np.argmax(res - bound))
        raise NotAnAlgebra(f"basis product {divmod(i, k)} escapes the span")
    return coords.reshape(k, k, k)


def is_star_closed(a: MatrixSubspace, tol: float = DEFAULT_TOL) -> bool:
    return all(a.contains(dagger(m), tol) for m in a.basis_list())


def unit_coords(a: MatrixSubspace, mult: np.ndarray | None = None, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Coordinates of the two-sided unit of the algebra; NotUnital if none."""
    k = a.dim
    if k == 0:
        raise NotUnital("the zero algebra has no unit")
    m = multiplication_tensor(a, tol) if mult is None else mult
    # unit x: sum_i x_i m[i, j, :] = e_j and sum_i x_i m[j, i, :] = e_j for all j
    left = np.swapaxes(m, 0, 1).reshape(k, k * k).T  # rows (j, c), cols i
    right = m.reshape(k, k * k).T
    target = np.eye(k, dtype=complex).ravel()
    system = np.vstack([left, right])
    rhs = np.concatenate([target, target])
    x, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    if np.linalg.norm(system @ x - rhs) > tol * max(1.0, np.linalg.norm(rhs)) * 10:
        raise NotUnital("no two-sided unit solves the linear system")
    return x


def unit_element(a: MatrixSubspace, tol: float = DEFAULT_TOL) -> np.ndarray:
    return a.from_coords(unit_coords(a, tol=tol))


def center_dimension(a: MatrixSubspace, mult: np.ndarray | None = None, tol: float = DEFAULT_TOL) -> int:
    """dim of {z in A : zb = bz for all b}, via the structure constants."""
    k = a.dim
    if k == 0:
        return 0
    m = multiplication_tensor(a, tol) if mult is None else mult
    # rows indexed by (j, c), columns by i: m[i, j, c] - m[j, i, c]
    comm = (np.swapaxes(m, 0, 1) - m).reshape(k, k * k).T
    sv = np.linalg.svd(comm, compute_uv=False) if comm.size else np.array([])
    scale = max(float(sv[0]) if sv.size else 0.0, 1.0)
    rank = int(np.sum(sv > tol * scale))
    return k - rank


def wedderburn_block_count(a: MatrixSubspace, tol: float = DEFAULT_TOL) -> int:
    """Number of simple summands of a unital *-closed matrix algebra.

    Equals the center dimension. Raises NotAnAlgebra if the subspace is not
    closed under products/adjoints and NotUnital if it has no unit.
    """
    if not is_star_closed(a, tol):
        raise NotAnAlgebra("not closed under adjoints")
    mult = multiplication_tensor(a, tol)
    unit_coords(a, mult, tol)
    return center_dimension(a, mult, tol)


def center_subspace(a: MatrixSubspace, tol: float = DEFAULT_TOL) -> MatrixSubspace:
    k = a.dim
    mult = multiplication_tensor(a, tol)
    comm = (np.swapaxes(mult, 0, 1) - mult).reshape(k, k * k).T
    u, sv, vh = np.linalg.svd(comm)
    scale = max(float(sv[0]) if sv.size else 0.0, 1.0)
    rank = int(np.sum(sv > tol * scale))
    null = vh[rank:].conj()  # rows span the nullspace in coordinate space
    mats = [a.from_coords(c) for c in null]
    return orthonormalize(mats, ambient_dim=a.ambient_dim, tol=tol)


def minimal_central_projections(a: MatrixSubspace, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """The minimal central projections of a unital *-closed matrix algebra.

    Diagonalizes a generic Hermitian central element and groups its spectral
    projections; retries with fresh randomness if a collision degenerates.
    """
    mult = multiplication_tensor(a, tol)
    unit = a.from_coords(unit_coords(a, mult, tol))
    blocks = center_dimension(a, mult, tol)
    z_space = center_subspace(a, tol)
    rng = np.random.default_rng(7)
    for _ in range(8):
        c = rng.normal(size=z_space.dim) + 1j * rng.normal(size=z_space.dim)
        z = z_space.from_coords(c)
        z = (z + dagger(z)) / 2
        # spectral projections of z within the support of the algebra
        w, v = np.linalg.eigh(z)
        groups: list[list[int]] = []
        for i, lam in enumerate(w):
            if groups and abs(lam - w[groups[-1][-1]]) < 1e-7 * max(1.0, abs(w).max()):
                groups[-1].append(i)
            else:
                groups.append([i])
        projs = []
        for idx in groups:
            p = sum(np.outer(v[:, i], v[:, i].conj()) for i in idx)
            p = unit @ p @ unit  # discard the part outside the support
            if hs_norm(p) > tol * 10:
                projs.append(p)
        ok = (
            len(projs) == blocks
            and all(hs_norm(p @ p - p) <= 1e-7 * max(1.0, hs_norm(p)) for p in projs)
            and all(a.contains(p, 1e-7) for p in projs)
        )
        if ok:
            projs.sort(key=lambda p: (round(hs_norm(p) ** 2), np.argmax(np.abs(np.diag(p)) > 1e-7)))
            return projs
    raise NotAnAlgebra("could not resolve minimal central projections")
