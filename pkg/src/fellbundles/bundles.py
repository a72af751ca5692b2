"""Fell bundles over finite groups as gradings of a matrix algebra.

A GradedBundle assigns a subspace of one ambient M_n(C) to every group
element; the Fell axioms (product closure, adjoint symmetry, independence,
unit-fiber algebra, C*-identity) are machine-checked by verify_fell_axioms.

An AbstractBundle carries the same data as structure constants plus a
faithful positive functional on the unit fiber; concretize() turns it back
into matrices through the left regular representation. The constructions in
between (trivial, pullback, semidirect, twisted semidirect, quotient by a
multiplier family) are the substance of the toolkit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AxiomViolation,
    DegenerateFunctional,
    GroupMismatch,
    InvalidAction,
    InvalidMultiplierFamily,
    InvalidTwist,
    NonUnitalUnitFiber,
    NotAnAlgebra,
    NotASubgroup,
    NotNormal,
    NotUnital,
    ShapeMismatch,
)
from .groups import FiniteGroup, NormalSubgroup, Quotient, left_regular, quotient
from .matrices import (
    DEFAULT_TOL,
    MatrixSubspace,
    dagger,
    hs_norm,
    multiplication_tensor,
    op_norm,
    orthonormalize,
    unit_element,
)


@dataclass(frozen=True)
class GradedBundle:
    """A grading of M_n(C) indexed by the elements of a finite group."""

    group: FiniteGroup
    fibers: tuple[MatrixSubspace, ...]

    def __post_init__(self) -> None:
        if len(self.fibers) != self.group.order:
            raise ShapeMismatch(
                f"{len(self.fibers)} fibers for a group of order {self.group.order}"
            )
        dims = {f.ambient_dim for f in self.fibers}
        if len(dims) != 1:
            raise ShapeMismatch(f"fibers live in different ambients: {sorted(dims)}")

    @property
    def ambient_dim(self) -> int:
        return self.fibers[0].ambient_dim

    def fiber(self, s: int) -> MatrixSubspace:
        return self.fibers[s]

    def section_dimension(self) -> int:
        return sum(f.dim for f in self.fibers)

    def fiber_dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.fibers)


def verify_fell_axioms(bundle: GradedBundle, tol: float = 1e-8) -> dict:
    """Check the five grading axiom families and report residuals.

    Returns {"pass": bool, "checks": {...}, "violations": [...]}; a violation
    records the axiom, the group indices involved, and the residual.
    """
    g = bundle.group
    violations: list[dict] = []

    prod_res = 0.0
    for s in g.elements():
        fs = bundle.fiber(s)
        for t in g.elements():
            ft, fst = bundle.fiber(t), bundle.fiber(g.mul(s, t))
            for a in fs.basis_list():
                for b in ft.basis_list():
                    p = a @ b
                    r = fst.residual(p) / max(1.0, hs_norm(p))
                    prod_res = max(prod_res, r)
                    if r > tol:
                        violations.append(
                            {"axiom": "product_closure", "s": s, "t": t, "residual": r}
                        )

    adj_res = 0.0
    for s in g.elements():
        fs, fsi = bundle.fiber(s), bundle.fiber(g.inv(s))
        if fs.dim != fsi.dim:
            violations.append(
                {"axiom": "adjoint_symmetry", "s": s, "t": None,
                 "residual": float(abs(fs.dim - fsi.dim))}
            )
        for a in fs.basis_list():
            r = fsi.residual(dagger(a))  # basis elements have norm 1
            adj_res = max(adj_res, r)
            if r > tol:
                violations.append({"axiom": "adjoint_symmetry", "s": s, "t": None, "residual": r})

    total = bundle.section_dimension()
    if total:
        stack = np.concatenate([f.flat for f in bundle.fibers if f.dim], axis=0)
        sv = np.linalg.svd(stack, compute_uv=False)
        min_sv = float(sv[-1])
    else:
        min_sv = 1.0
    if min_sv <= tol:
        violations.append({"axiom": "independent_grading", "s": None, "t": None, "residual": min_sv})

    # checked directly even though the (e, e) and adjoint sweeps above cover it
    fe = bundle.fiber(0)
    unit_res = 0.0
    for a in fe.basis_list():
        unit_res = max(unit_res, fe.residual(dagger(a)))
        for b in fe.basis_list():
            p = a @ b
            unit_res = max(unit_res, fe.residual(p) / max(1.0, hs_norm(p)))
    if unit_res > tol:
        violations.append({"axiom": "unit_fiber_algebra", "s": 0, "t": 0, "residual": unit_res})

    cstar_res = 0.0
    for s in g.elements():
        for a in bundle.fiber(s).basis_list():
            na = op_norm(a)
            r = abs(op_norm(dagger(a) @ a) - na * na) / max(1.0, na * na)
            cstar_res = max(cstar_res, r)
            if r > tol:
                violations.append({"axiom": "cstar_identity", "s": s, "t": None, "residual": r})

    checks = {
        "product_closure": {"pass": prod_res <= tol, "max_residual": prod_res},
        "adjoint_symmetry": {"pass": not any(v["axiom"] == "adjoint_symmetry" for v in violations),
                             "max_residual": adj_res},
        "independent_grading": {"pass": min_sv > tol, "min_singular_value": min_sv},
        "unit_fiber_algebra": {"pass": unit_res <= tol, "max_residual": unit_res},
        "cstar_identity": {"pass": cstar_res <= tol, "max_residual": cstar_res},
    }
    return {"pass": not violations, "checks": checks, "violations": violations}


def require_fell_axioms(bundle: GradedBundle, tol: float = 1e-8) -> None:
    report = verify_fell_axioms(bundle, tol)
    if not report["pass"]:
        first = report["violations"][0]
        raise AxiomViolation(f"grading axiom failed: {first}")


# basic constructions


def trivial_bundle(g: FiniteGroup, coeff: MatrixSubspace, tol: float = DEFAULT_TOL) -> GradedBundle:
    """Constant-fiber bundle: fiber(s) = coeff tensor lambda(s) in M_{n|G|}.

    coeff must be a unital *-subalgebra of its ambient (NotAnAlgebra/NotUnital
    otherwise); its unit need not be the ambient identity.
    """
    multiplication_tensor(coeff, tol)
    unit_element(coeff, tol)
    if not all(coeff.contains(dagger(m), tol) for m in coeff.basis_list()):
        raise NotAnAlgebra("coefficient algebra is not adjoint-closed")
    lam = left_regular(g)
    scale = 1.0 / np.sqrt(g.order)
    fibers = []
    for s in g.elements():
        mats = [np.kron(d, lam[s]) * scale for d in coeff.basis_list()]
        fibers.append(MatrixSubspace(coeff.ambient_dim * g.order,
                                     np.stack(mats) if mats else
                                     np.zeros((0, coeff.ambient_dim * g.order,
                                               coeff.ambient_dim * g.order), dtype=complex)))
    return GradedBundle(g, tuple(fibers))


def pullback(d: GradedBundle, q: Quotient) -> GradedBundle:
    """Pull a bundle over G/N back to G: fiber(s) = fiber_D(sN) tensor lambda(s).

    The fiber basis keeps the index order of d's fibers, so generator maps
    between d and the pull-back are index-aligned.
    """
    if d.group.table != q.quotient_group.table:
        raise GroupMismatch("bundle is not graded by the quotient group of q")
    g = q.group
    lam = left_regular(g)
    nd = d.ambient_dim
    scale = 1.0 / np.sqrt(g.order)
    fibers = []
    for s in g.elements():
        base = d.fiber(q.coset_of[s])
        mats = [np.kron(m, lam[s]) * scale for m in base.basis_list()]
        fibers.append(MatrixSubspace(nd * g.order,
                                     np.stack(mats) if mats else
                                     np.zeros((0, nd * g.order, nd * g.order), dtype=complex)))
    return GradedBundle(g, tuple(fibers))


def restrict(bundle: GradedBundle, members) -> GradedBundle:
    """Restrict the grading to a subgroup; fibers follow sorted(members)."""
    g = bundle.group
    mem = tuple(sorted(set(int(m) for m in members)))
    if 0 not in mem or any(g.mul(a, b) not in mem for a in mem for b in mem):
        raise NotASubgroup(f"{mem} is not closed in {g.name}")
    index = {h: i for i, h in enumerate(mem)}
    table = tuple(tuple(index[g.mul(a, b)] for b in mem) for a in mem)
    sub = FiniteGroup(table, name=f"{g.name}|{mem}")
    return GradedBundle(sub, tuple(bundle.fiber(h) for h in mem))


# unitary multiplier families


@dataclass(frozen=True)
class UnitaryMultiplierFamily:
    """Unitaries U(n), n in a normal subgroup, normalizing the grading."""

    bundle: GradedBundle
    domain: tuple[int, ...]
    mats: dict

    def mat(self, n: int) -> np.ndarray:
        return self.mats[n]


def canonical_multiplier_family(p: GradedBundle, q: Quotient) -> UnitaryMultiplierFamily:
    """U(n) = (unit of fiber(e)) * (1 tensor lambda(n)) on a pulled-back bundle."""
    if p.group.table != q.group.table:
        raise GroupMismatch("bundle group differs from the quotient's parent group")
    g = q.group
    if p.ambient_dim % g.order:
        raise ShapeMismatch("ambient dimension is not a multiple of |G|")
    try:
        u_e = unit_element(p.fiber(0))
    except NotUnital as exc:
        raise NonUnitalUnitFiber(str(exc)) from exc
    lam = left_regular(g)
    eye = np.eye(p.ambient_dim // g.order)
    mats = {n: u_e @ np.kron(eye, lam[n]) for n in q.subgroup.members}
    return UnitaryMultiplierFamily(p, q.subgroup.members, mats)


def verify_multiplier_family(u: UnitaryMultiplierFamily, tol: float = DEFAULT_TOL) -> dict:
    """Check the multiplier-family axioms against the bundle's grading.

    Homomorphism and adjoint identities make each U(n) unitary on the support
    of the bundle; U(e) must act as the identity on every fiber. The two-sided
    module axiom R(a)b = a L(b) is matrix associativity here, so it needs no
    separate check.
    """
    bundle, g = u.bundle, u.bundle.group
    dom = set(u.domain)
    violations: list[dict] = []

    def close(x, y):
        return float(hs_norm(x - y))

    if not dom or any(g.mul(a, b) not in dom for a in dom for b in dom):
        raise NotASubgroup("multiplier domain is not a subgroup")
    for s in g.elements():
        if any(g.conjugate(s, n) not in dom for n in dom):
            raise NotNormal(f"conjugation by {s} leaves the multiplier domain")

    hom_res = 0.0
    for n in dom:
        for m in dom:
            hom_res = max(hom_res, close(u.mat(n) @ u.mat(m), u.mat(g.mul(n, m))))
        hom_res = max(hom_res, close(dagger(u.mat(n)), u.mat(g.inv(n))))
    if hom_res > tol:
        violations.append({"axiom": "homomorphism", "residual": hom_res})

    unit_res = 0.0
    ue = u.mat(0)
    for s in g.elements():
        for a in bundle.fiber(s).basis_list():
            unit_res = max(unit_res, close(ue @ a, a), close(a @ ue, a))
    if unit_res > tol:
        violations.append({"axiom": "unit_acts_trivially", "residual": unit_res})

    order_res = 0.0
    for n in dom:
        for t in g.elements():
            f_nt, f_tn = bundle.fiber(g.mul(n, t)), bundle.fiber(g.mul(t, n))
            for a in bundle.fiber(t).basis_list():
                left = u.mat(n) @ a
                right = a @ u.mat(n)
                order_res = max(order_res,
                                f_nt.residual(left) / max(1.0, hs_norm(left)),
                                f_tn.residual(right) / max(1.0, hs_norm(right)))
    if order_res > tol:
        violations.append({"axiom": "order_compatibility", "residual": order_res})

    cov_res = 0.0
    for s in g.elements():
        for n in dom:
            un_conj = u.mat(g.conjugate(s, n))
            for a in bundle.fiber(s).basis_list():
                cov_res = max(cov_res, close(a @ u.mat(n), un_conj @ a))
    if cov_res > tol:
        violations.append({"axiom": "covariance", "residual": cov_res})

    checks = {
        "homomorphism": {"pass": hom_res <= tol, "max_residual": hom_res},
        "unit_acts_trivially": {"pass": unit_res <= tol, "max_residual": unit_res},
        "order_compatibility": {"pass": order_res <= tol, "max_residual": order_res},
        "covariance": {"pass": cov_res <= tol, "max_residual": cov_res},
    }
    return {"pass": not violations, "checks": checks, "violations": violations}


# twisted actions


@dataclass(frozen=True)
class TwistedAction:
    """An action of G on a matrix *-algebra with a twist over a normal subgroup.

    alpha[s] is the coordinate matrix of the automorphism in the algebra's
    basis; tau maps subgroup members to unitaries (relative to the algebra's
    own unit) inside the algebra.
    """

    algebra: MatrixSubspace
    group: FiniteGroup
    subgroup: NormalSubgroup
    alpha: np.ndarray
    tau: dict

    def apply(self, s: int, mat: np.ndarray) -> np.ndarray:
        return self.algebra.from_coords(self.alpha[s] @ self.algebra.coords(mat))


def plain_action(algebra: MatrixSubspace, g: FiniteGroup, alpha: np.ndarray) -> TwistedAction:
    """An untwisted action: trivial subgroup, twist = the algebra's unit."""
    return TwistedAction(algebra, g, NormalSubgroup(g, (0,)), np.asarray(alpha, dtype=complex),
                         {0: unit_element(algebra)})


def action_by_automorphisms(algebra: MatrixSubspace, g: FiniteGroup, maps) -> np.ndarray:
    """Coordinate matrices for automorphisms given as callables on matrices."""
    k = algebra.dim
    alpha = np.zeros((g.order, k, k), dtype=complex)
    for s in g.elements():
        for b in range(k):
            alpha[s, :, b] = algebra.coords(maps[s](algebra.basis[b]))
    return alpha


def verify_twisted_action(t: TwistedAction, tol: float = DEFAULT_TOL) -> dict:
    """Residual report for the action and twist identities."""
    alg, g, n = t.algebra, t.group, t.subgroup
    unit = unit_element(alg, tol)
    violations: list[dict] = []

    def record(axiom, residual):
        if residual > tol:
            violations.append({"axiom": axiom, "residual": residual})

    act_res = 0.0
    for s in g.elements():
        sv = np.linalg.svd(t.alpha[s], compute_uv=False)
        if sv.size and sv[-1] <= tol:
            act_res = max(act_res, 1.0)
        for a in alg.basis_list():
            act_res = max(act_res, hs_norm(dagger(t.apply(s, a)) - t.apply(s, dagger(a))))
            for b in alg.basis_list():
                act_res = max(act_res, hs_norm(t.apply(s, a @ b) - t.apply(s, a) @ t.apply(s, b)))
        for u in g.elements():
            act_res = max(act_res, float(np.linalg.norm(
                t.alpha[s] @ t.alpha[u] - t.alpha[g.mul(s, u)])))
    act_res = max(act_res, float(np.linalg.norm(t.alpha[0] - np.eye(alg.dim))))
    record("action", act_res)

    twist_res = 0.0
    for x in n.members:
        tx = t.tau[x]
        if not alg.contains(tx, tol):
            twist_res = max(twist_res, alg.residual(tx))
        twist_res = max(twist_res,
                        hs_norm(dagger(tx) @ tx - unit),
                        hs_norm(tx @ dagger(tx) - unit))
        for y in n.members:
            twist_res = max(twist_res, hs_norm(t.tau[x] @ t.tau[y] - t.tau[g.mul(x, y)]))
        for s in g.elements():
            twist_res = max(twist_res, hs_norm(t.apply(s, tx) - t.tau[g.conjugate(s, x)]))
        for b in alg.basis_list():
            twist_res = max(twist_res, hs_norm(t.apply(x, b) - tx @ b @ dagger(tx)))
    record("twist", twist_res)

    checks = {
        "action": {"pass": act_res <= tol, "max_residual": act_res},
        "twist": {"pass": twist_res <= tol, "max_residual": twist_res},
    }
    return {"pass": not violations, "checks": checks, "violations": violations}


def require_twisted_action(t: TwistedAction, tol: float = DEFAULT_TOL) -> None:
    report = verify_twisted_action(t, tol)
    for v in report["violations"]:
        if v["axiom"] == "action":
            raise InvalidAction(f"action residual {v['residual']:.3g}")
    if not report["pass"]:
        raise InvalidTwist(f"twist residual {report['violations'][0]['residual']:.3g}")


# abstract bundles (structure constants + involution + functional)


@dataclass(frozen=True)
class AbstractBundle:
    """Fibers as coordinate spaces with product/involution structure constants.

    prod[(s, t)] has shape (dim_s, dim_t, dim_st); invol[s] maps conjugated
    fiber-s coordinates to fiber-s^-1 coordinates; funct is a faithful
    positive functional on fiber(e) coordinates.
    """

    group: FiniteGroup
    dims: tuple[int, ...]
    prod: dict
    invol: tuple
    funct: np.ndarray

    def mul_coords(self, s: int, t: int, x, y) -> np.ndarray:
        return np.einsum("a,b,abc->c", np.asarray(x), np.asarray(y), self.prod[(s, t)])

    def star_coords(self, s: int, x) -> np.ndarray:
        return np.conj(np.asarray(x)) @ self.invol[s]

    def section_dimension(self) -> int:
        return sum(self.dims)


def verify_abstract_bundle(b: AbstractBundle, tol: float = DEFAULT_TOL) -> dict:
    """Associativity, involution coherence, and Gram positivity report."""
    g = b.group
    violations: list[dict] = []

    assoc = 0.0
    for s in g.elements():
        for t in g.elements():
            st = g.mul(s, t)
            for u in g.elements():
                tu, stu = g.mul(t, u), g.mul(st, u)
                lhs = np.einsum("abm,mcd->abcd", b.prod[(s, t)], b.prod[(st, u)])
                rhs = np.einsum("bcm,amd->abcd", b.prod[(t, u)], b.prod[(s, tu)])
                assoc = max(assoc, float(np.linalg.norm(lhs - rhs)))
    if assoc > tol:
        violations.append({"axiom": "associativity", "residual": assoc})

    inv_res = 0.0
    for s in g.elements():
        si = g.inv(s)
        back = np.conj(b.invol[s]) @ b.invol[si]
        inv_res = max(inv_res, float(np.linalg.norm(back - np.eye(b.dims[s]))))
        for t in g.elements():
            st, ti = g.mul(s, t), g.inv(t)
            lhs = np.einsum("abm,mc->abc", b.prod[(s, t)], b.invol[st]).conj()
            rhs = np.einsum("bq,ap,qpc->abc", b.invol[t].conj(), b.invol[s].conj(),
                            b.prod[(ti, si)])
            inv_res = max(inv_res, float(np.linalg.norm(lhs - rhs)))
    if inv_res > tol:
        violations.append({"axiom": "involution", "residual": inv_res})

    gram_min = np.inf
    for s in g.elements():
        gram = _gram_block(b, s)
        if gram.shape[0]:
            w = np.linalg.eigvalsh((gram + dagger(gram)) / 2)
            gram_min = min(gram_min, float(w[0]))
    gram_ok = bool(np.isinf(gram_min) or gram_min > 0)
    if not gram_ok:
        violations.append({"axiom": "gram_positive_definite", "residual": float(gram_min)})

    checks = {
        "associativity": {"pass": assoc <= tol, "max_residual": assoc},
        "involution": {"pass": inv_res <= tol, "max_residual": inv_res},
        "gram_positive_definite": {"pass": gram_ok,
                                   "min_eigenvalue": None if np.isinf(gram_min) else float(gram_min)},
    }
    return {"pass": not violations, "checks": checks, "violations": violations}


def _gram_block(b: AbstractBundle, s: int) -> np.ndarray:
    """Gram_s[a, c] = funct((e_a)* e_c), the fiber-s block of the inner product."""
    si = b.group.inv(s)
    return np.einsum("ap,pbc,c->ab", b.invol[s], b.prod[(si, s)], b.funct)


def semidirect_bundle(t: TwistedAction, tol: float = DEFAULT_TOL) -> AbstractBundle:
    """Product (b, s)(c, t) = (b alpha_s(c), st), adjoint (b, s)* = (alpha_{s^-1}(b)*, s^-1).

    The twist of t is ignored; only the action enters. Coefficients live in
    t.algebra and the functional is the ambient trace on the e-fiber.
    """
    require_twisted_action(
        TwistedAction(t.algebra, t.group, NormalSubgroup(t.group, (0,)), t.alpha,
                      {0: unit_element(t.algebra)}), tol)
    alg, g = t.algebra, t.group
    k = alg.dim
    mult = multiplication_tensor(alg, tol)
    star = np.stack([alg.coords(dagger(m)) for m in alg.basis_list()]) if k else np.zeros((0, 0))
    prod = {}
    invol = []
    for s in g.elements():
        for u in g.elements():
            prod[(s, u)] = np.einsum("apc,pb->abc", mult, t.alpha[s])
        w = t.alpha[g.inv(s)]
        invol.append(np.einsum("pa,pc->ac", np.conj(w), star))
    funct = np.array([np.trace(m) for m in alg.basis_list()], dtype=complex)
    return AbstractBundle(g, (k,) * g.order, prod, tuple(invol), funct)


def twisted_semidirect_bundle(t: TwistedAction, tol: float = DEFAULT_TOL) -> AbstractBundle:
    """Collapse a twisted action to a bundle over G/N.

    Fibers are copies of the coefficient algebra indexed by cosets; products
    are computed at the minimal-representative section and realigned with the
    twist, via the orbit identity [b, ns] = [b tau(n), s].
    """
    require_twisted_action(t, tol)
    q = quotient(t.group, t.subgroup)
    alg, g, qg = t.algebra, t.group, q.quotient_group
    k = alg.dim
    prod = {}
    invol = []
    for a_cos in qg.elements():
        ca = q.section[a_cos]
        for b_cos in qg.elements():
            cb = q.section[b_cos]
            ab = qg.mul(a_cos, b_cos)
            pos = g.mul(ca, cb)
            n = g.mul(pos, g.inv(q.section[ab]))  # [x, pos] = [x tau(n), section]
            tensor = np.zeros((k, k, k), dtype=complex)
            for i in range(k):
                for j in range(k):
                    x = alg.basis[i] @ t.apply(ca, alg.basis[j]) @ t.tau[n]
                    tensor[i, j, :] = alg.coords(x)
            prod[(a_cos, b_cos)] = tensor
        abar = qg.inv(a_cos)
        pos = g.inv(ca)
        n = g.mul(pos, g.inv(q.section[abar]))
        mat = np.zeros((k, k), dtype=complex)
        for i in range(k):
            x = dagger(t.apply(g.inv(ca), alg.basis[i])) @ t.tau[n]
            mat[i, :] = alg.coords(x)
        invol.append(mat)
    funct = np.array([np.trace(m) for m in alg.basis_list()], dtype=complex)
    return AbstractBundle(qg, (k,) * qg.order, prod, tuple(invol), funct)


def twisted_normal_form(t: TwistedAction, coeff: np.ndarray, s: int) -> tuple[int, np.ndarray]:
    """Normal form of the class [coeff, s]: the representative at section(sN)."""
    q = quotient(t.group, t.subgroup)
    k = q.coset_of[s]
    n = t.group.mul(s, t.group.inv(q.section[k]))
    return k, coeff @ t.tau[n]


@dataclass(frozen=True)
class Realization:
    """A concretized abstract bundle plus the images of the abstract bases."""

    bundle: GradedBundle
    images: tuple  # images[s][a] = matrix image of abstract basis a of fiber s


def concretize(b: AbstractBundle, tol: float = DEFAULT_TOL) -> Realization:
    """Left regular representation on the section space.

    The inner product is funct((x)* y); its Gram matrix must be positive
    definite (DegenerateFunctional otherwise), which also makes the
    representation faithful and fiberwise isometric for the unique C*-norm.
    """
    g = b.group
    dims = b.dims
    offs = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    d = int(offs[-1])
    roots, root_invs = [], []
    for s in g.elements():
        gram = _gram_block(b, s)
        gram = (gram + dagger(gram)) / 2
        if gram.shape[0] == 0:
            roots.append(gram)
            root_invs.append(gram)
            continue
        w, v = np.linalg.eigh(gram)
        if w[0] <= tol * max(1.0, float(w[-1])):
            raise DegenerateFunctional(f"Gram block at element {s} has eigenvalue {w[0]:.3g}")
        roots.append((v * np.sqrt(w)) @ dagger(v))
        root_invs.append((v / np.sqrt(w)) @ dagger(v))
    images = []
    for s in g.elements():
        fiber_imgs = []
        for a in range(dims[s]):
            m = np.zeros((d, d), dtype=complex)
            for t in g.elements():
                if dims[t] == 0:
                    continue
                st = g.mul(s, t)
                block = roots[st] @ b.prod[(s, t)][a].T @ root_invs[t]
                m[offs[st]:offs[st + 1], offs[t]:offs[t + 1]] = block
            fiber_imgs.append(m)
        images.append(tuple(fiber_imgs))
    fibers = []
    for s in g.elements():
        if images[s]:
            fibers.append(orthonormalize(list(images[s]), ambient_dim=d, tol=tol))
        else:
            fibers.append(MatrixSubspace(d, np.zeros((0, d, d), dtype=complex)))
        if fibers[-1].dim != dims[s]:
            raise DegenerateFunctional(
                f"fiber {s} collapsed from {dims[s]} to {fibers[-1].dim} dimensions")
    return Realization(GradedBundle(g, tuple(fibers)), tuple(images))


def abstract_from_graded(bundle: GradedBundle, tol: float = DEFAULT_TOL) -> AbstractBundle:
    """Read structure constants off a concrete grading; functional = trace."""
    g = bundle.group
    dims = bundle.fiber_dims()
    prod = {}
    invol = []
    for s in g.elements():
        fs = bundle.fiber(s)
        for t in g.elements():
            ft, fst = bundle.fiber(t), bundle.fiber(g.mul(s, t))
            tensor = np.zeros((dims[s], dims[t], fst.dim), dtype=complex)
            for a in range(dims[s]):
                for b in range(dims[t]):
                    p = fs.basis[a] @ ft.basis[b]
                    if not fst.contains(p, max(tol, 1e-8)):
                        raise AxiomViolation(f"product escapes fiber ({s},{t})")
                    tensor[a, b, :] = fst.coords(p)
            prod[(s, t)] = tensor
        fsi = bundle.fiber(g.inv(s))
        mat = np.zeros((dims[s], fsi.dim), dtype=complex)
        for a in range(dims[s]):
            adj = dagger(fs.basis[a])
            if not fsi.contains(adj, max(tol, 1e-8)):
                raise AxiomViolation(f"adjoint escapes fiber {s}")
            mat[a, :] = fsi.coords(adj)
        invol.append(mat)
    funct = np.array([np.trace(m) for m in bundle.fiber(0).basis_list()], dtype=complex)
    return AbstractBundle(g, dims, prod, tuple(invol), funct)


def quotient_bundle(a: GradedBundle, u: UnitaryMultiplierFamily,
                    q: Quotient | None = None, tol: float = DEFAULT_TOL) -> AbstractBundle:
    """Collapse a bundle over G along a multiplier family over normal N.

    The coset-k fiber is represented on A_{section(k)}; products of
    representatives are realigned by U(m)* with m = c(st)^-1 c(s) c(t).
    """
    g = a.group
    if u.bundle.group.table != g.table or u.bundle.ambient_dim != a.ambient_dim:
        raise GroupMismatch("multiplier family was built for a different bundle")
    fam = u if u.bundle is a else UnitaryMultiplierFamily(a, u.domain, u.mats)
    report = verify_multiplier_family(fam, max(tol, 1e-8))
    if not report["pass"]:
        raise InvalidMultiplierFamily(str(report["violations"][0]))
    if q is None:
        q = quotient(g, NormalSubgroup(g, u.domain))
    if tuple(sorted(u.domain)) != q.subgroup.members:
        raise GroupMismatch("multiplier domain differs from the quotient subgroup")
    qg = q.quotient_group
    dims = tuple(a.fiber(q.section[k]).dim for k in qg.elements())
    prod = {}
    invol = []
    for k in qg.elements():
        ck = q.section[k]
        fk = a.fiber(ck)
        for l in qg.elements():
            cl = q.section[l]
            fl = a.fiber(cl)
            kl = qg.mul(k, l)
            fkl = a.fiber(q.section[kl])
            m = g.mul(g.inv(q.section[kl]), g.mul(ck, cl))
            corr = dagger(u.mat(m))
            tensor = np.zeros((dims[k], dims[l], dims[kl]), dtype=complex)
            for i in range(dims[k]):
                for j in range(dims[l]):
                    x = fk.basis[i] @ fl.basis[j] @ corr
                    if not fkl.contains(x, max(tol, 1e-8)):
                        raise InvalidMultiplierFamily(
                            f"realigned product escapes the section fiber ({k},{l})")
                    tensor[i, j, :] = fkl.coords(x)
            prod[(k, l)] = tensor
        kbar = qg.inv(k)
        fkbar = a.fiber(q.section[kbar])
        m = g.mul(g.inv(ck), g.inv(q.section[kbar]))
        corr = dagger(u.mat(m))
        mat = np.zeros((dims[k], dims[kbar]), dtype=complex)
        for i in range(dims[k]):
            x = dagger(fk.basis[i]) @ corr
            if not fkbar.contains(x, max(tol, 1e-8)):
                raise InvalidMultiplierFamily(f"realigned adjoint escapes fiber {k}")
            mat[i, :] = fkbar.coords(x)
        invol.append(mat)
    funct = np.array([np.trace(m) for m in a.fiber(q.section[0]).basis_list()], dtype=complex)
    return AbstractBundle(qg, dims, prod, tuple(invol), funct)


# bundle isomorphisms


def bundle_isomorphism_report(a: GradedBundle, b: GradedBundle, phi,
                              tol: float = DEFAULT_TOL, samples: int = 4) -> dict:
    """Residuals for phi: A -> B as a fiberwise linear, multiplicative,
    adjoint-preserving, isometric bijection. phi(s, mat) -> mat.

    Ambients may differ; only the group must match.
    """
    if a.group.table != b.group.table:
        raise GroupMismatch("isomorphism between bundles over different groups")
    g = a.group
    rng = np.random.default_rng(11)
    violations: list[dict] = []

    bij_res, lin_res = 0.0, 0.0
    for s in g.elements():
        fa, fb = a.fiber(s), b.fiber(s)
        if fa.dim != fb.dim:
            violations.append({"axiom": "bijective", "s": s,
                               "residual": float(abs(fa.dim - fb.dim))})
            continue
        if fa.dim == 0:
            continue
        imgs = [phi(s, m) for m in fa.basis_list()]
        for m in imgs:
            bij_res = max(bij_res, fb.residual(m) / max(1.0, hs_norm(m)))
        coord_map = np.stack([fb.coords(m) for m in imgs]).T
        sv = np.linalg.svd(coord_map, compute_uv=False)
        if sv[-1] <= tol * max(1.0, sv[0]):
            violations.append({"axiom": "bijective", "s": s, "residual": float(sv[-1])})
        for _ in range(samples):
            c = rng.normal(size=fa.dim) + 1j * rng.normal(size=fa.dim)
            lin = phi(s, fa.from_coords(c))
            lin_res = max(lin_res, hs_norm(lin - np.tensordot(c, np.stack(imgs), axes=(0, 0)))
                          / max(1.0, hs_norm(lin)))
    if bij_res > tol:
        violations.append({"axiom": "into_fibers", "s": None, "residual": bij_res})

    mult_res, star_res, norm_res = 0.0, 0.0, 0.0
    for s in g.elements():
        fa = a.fiber(s)
        for m in fa.basis_list():
            star_res = max(star_res, hs_norm(phi(g.inv(s), dagger(m)) - dagger(phi(s, m))))
            norm_res = max(norm_res, abs(op_norm(phi(s, m)) - op_norm(m)) / max(1.0, op_norm(m)))
        for t in g.elements():
            ft = a.fiber(t)
            for m in fa.basis_list():
                for w in ft.basis_list():
                    mult_res = max(mult_res,
                                   hs_norm(phi(g.mul(s, t), m @ w) - phi(s, m) @ phi(t, w)))
        for _ in range(samples):
            c = rng.normal(size=fa.dim) + 1j * rng.normal(size=fa.dim)
            if fa.dim:
                x = fa.from_coords(c)
                norm_res = max(norm_res, abs(op_norm(phi(s, x)) - op_norm(x)) / max(1.0, op_norm(x)))
    for name, res in [("multiplicative", mult_res), ("star", star_res),
                      ("isometric", norm_res), ("linear", lin_res)]:
        if res > tol:
            violations.append({"axiom": name, "s": None, "residual": res})

    checks = {
        "into_fibers": {"pass": bij_res <= tol, "max_residual": bij_res},
        "bijective": {"pass": not any(v["axiom"] == "bijective" for v in violations)},
        "linear": {"pass": lin_res <= tol, "max_residual": lin_res},
        "multiplicative": {"pass": mult_res <= tol, "max_residual": mult_res},
        "star": {"pass": star_res <= tol, "max_residual": star_res},
        "isometric": {"pass": norm_res <= tol, "max_residual": norm_res},
    }
    return {"pass": not violations, "checks": checks, "violations": violations}


def verify_bundle_isomorphism(a: GradedBundle, b: GradedBundle, phi,
                              tol: float = DEFAULT_TOL) -> bool:
    return bundle_isomorphism_report(a, b, phi, tol)["pass"]


def realization_isomorphism_report(abstract: AbstractBundle, real: Realization,
                                   target: GradedBundle, images_in_target,
                                   tol: float = DEFAULT_TOL) -> dict:
    """Compare a concretized abstract bundle with prescribed images in a target.

    images_in_target[s][a] is where the abstract basis element a of fiber s
    should land inside target; the induced map from the concretized bundle is
    checked as a bundle isomorphism.
    """
    stacks = []
    for s in abstract.group.elements():
        if abstract.dims[s]:
            stacks.append(np.stack([m.ravel() for m in real.images[s]]).T)
        else:
            stacks.append(None)

    def phi(s, mat):
        if abstract.dims[s] == 0:
            return np.zeros((target.ambient_dim, target.ambient_dim), dtype=complex)
        c, *_ = np.linalg.lstsq(stacks[s], mat.ravel(), rcond=None)
        out = np.zeros((target.ambient_dim, target.ambient_dim), dtype=complex)
        for a, img in enumerate(images_in_target[s]):
            out = out + c[a] * img
        return out

    return bundle_isomorphism_report(real.bundle, target, phi, tol)
