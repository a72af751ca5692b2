"""Landstad-type reconstruction, the pull-back characterization, and
induction obstructions.

Three dualities live here, all stated as verified bundle isomorphisms:
reconstructing a twisted action from a bundle over G/N equipped with a
compatible unitary family; the equivalence between the semidirect bundle of a
twisted action and the pull-back of its collapsed (twisted semidirect) bundle,
together with twist extraction from a multiplier family; and the pull-back /
quotient round trips. The last section handles transformation systems: graded
ideals of a section algebra, G-simplicity, and the stabilizer obstruction to
realizing a grading as a pull-back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundles import (
    GradedBundle,
    Realization,
    TwistedAction,
    UnitaryMultiplierFamily,
    bundle_isomorphism_report,
    canonical_multiplier_family,
    concretize,
    plain_action,
    pullback,
    quotient_bundle,
    realization_isomorphism_report,
    require_twisted_action,
    semidirect_bundle,
    twisted_normal_form,
    twisted_semidirect_bundle,
    verify_multiplier_family,
)
from .errors import (
    AxiomViolation,
    FiberNotPrincipal,
    GroupMismatch,
    InvalidAction,
    InvalidMultiplierFamily,
    MultiplierNotOrderCompatible,
    NotASubgroup,
    NotUnital,
    NonUnitalUnitFiber,
    ShapeMismatch,
    TrivialN,
)
from .groups import (
    FiniteGroup,
    NormalSubgroup,
    Quotient,
    is_subgroup,
    left_regular,
    quotient,
)
from .matrices import (
    DEFAULT_TOL,
    MatrixSubspace,
    dagger,
    hs_norm,
    minimal_central_projections,
    orthonormalize,
    unit_element,
)
from .sections import SectionAlgebra, section_algebra


def _image(real: Realization, k: int, coords: np.ndarray) -> np.ndarray:
    """Concrete image of the abstract fiber-k element with the given coords."""
    return np.tensordot(np.asarray(coords, dtype=complex),
                        np.stack(real.images[k]), axes=(0, 0))


# reconstruction of a twisted action from a bundle over G/N


def landstad_reconstruct(d: GradedBundle, q: Quotient, u: UnitaryMultiplierFamily,
                         tol: float = 1e-8) -> tuple[TwistedAction, dict]:
    """Recover (B, G, N, alpha, tau) from a bundle over G/N and a unitary family.

    u assigns to every s in G a unitary multiplier of d lying in the fiber over
    sN. Then B is the unit fiber, alpha_s = Ad u(s), and tau = u restricted to
    N; the map [b, s] -> b u(s) from the twisted semidirect bundle back onto d
    is verified as a bundle isomorphism and its report returned alongside.
    """
    g, qg = q.group, q.quotient_group
    if d.group.table != qg.table:
        raise GroupMismatch("bundle is not graded by the quotient group")
    if tuple(sorted(u.domain)) != tuple(g.elements()):
        raise GroupMismatch("the family must be defined on all of G")
    b_fib = d.fiber(0)
    try:
        unit = unit_element(b_fib)
    except NotUnital as exc:
        raise NonUnitalUnitFiber(str(exc)) from exc

    hom_res = hs_norm(u.mat(0) - unit)
    for s in g.elements():
        hom_res = max(hom_res, hs_norm(dagger(u.mat(s)) - u.mat(g.inv(s))))
        for t in g.elements():
            hom_res = max(hom_res, hs_norm(u.mat(s) @ u.mat(t) - u.mat(g.mul(s, t))))
    if hom_res > tol:
        raise InvalidMultiplierFamily(
            f"family is not a unitary homomorphism (residual {hom_res:.3g})")
    for s in g.elements():
        fib = d.fiber(q.coset_of[s])
        if fib.residual(u.mat(s)) > tol * max(1.0, hs_norm(u.mat(s))):
            raise MultiplierNotOrderCompatible(
                f"u({s}) does not lie in the fiber over its coset")

    # each fiber must be the principal module B u(s)
    for s in g.elements():
        span = orthonormalize([b @ u.mat(s) for b in b_fib.basis_list()],
                              ambient_dim=d.ambient_dim, tol=tol)
        fib = d.fiber(q.coset_of[s])
        if span.dim != fib.dim or any(
                fib.residual(m) > tol for m in span.basis_list()):
            raise FiberNotPrincipal(f"fiber over coset of {s} is not B*u({s})")

    k = b_fib.dim
    alpha = np.zeros((g.order, k, k), dtype=complex)
    for s in g.elements():
        for j in range(k):
            conj = u.mat(s) @ b_fib.basis[j] @ dagger(u.mat(s))
            if b_fib.residual(conj) > tol * max(1.0, hs_norm(conj)):
                raise MultiplierNotOrderCompatible(
                    f"Ad u({s}) does not preserve the unit fiber")
            alpha[s, :, j] = b_fib.coords(conj)
    tau = {n: u.mat(n) for n in q.subgroup.members}
    action = TwistedAction(b_fib, g, q.subgroup, alpha, tau)
    require_twisted_action(action, tol)

    abstract = twisted_semidirect_bundle(action, tol)
    real = concretize(abstract, tol)
    images = [[b_fib.basis[j] @ u.mat(q.section[c]) for j in range(k)]
              for c in qg.elements()]
    iso = realization_isomorphism_report(abstract, real, d, images, tol)
    if not iso["pass"]:
        raise AxiomViolation(f"reconstruction map failed: {iso['violations'][0]}")
    report = {"pass": True, "iso": iso, "coefficient_dim": k,
              "twist": {n: tau[n] for n in q.subgroup.members}}
    return action, report


def canonical_landstad_family(t: TwistedAction, real: Realization,
                              q: Quotient | None = None) -> UnitaryMultiplierFamily:
    """u(s) = image of the class [1, s] in a concretized twisted semidirect bundle."""
    g = t.group
    unit = unit_element(t.algebra)
    mats = {}
    for s in g.elements():
        c, coeff = twisted_normal_form(t, unit, s)
        mats[s] = _image(real, c, t.algebra.coords(coeff))
    return UnitaryMultiplierFamily(real.bundle, tuple(g.elements()), mats)


# the semidirect bundle as a pull-back of the twisted semidirect bundle


def olesen_pedersen_forward(t: TwistedAction, tol: float = 1e-8) -> dict:
    """Verify (b, s) -> ([b, s], s) against the pulled-back collapsed bundle.

    The untwisted semidirect bundle of the action is isomorphic to the
    pull-back along G -> G/N of the twisted semidirect bundle; both section
    algebras have dimension |G| * dim B.
    """
    require_twisted_action(t, tol)
    g = t.group
    q = quotient(g, t.subgroup)
    semi = semidirect_bundle(t, tol)
    semi_real = concretize(semi, tol)
    tw_real = concretize(twisted_semidirect_bundle(t, tol), tol)
    pb = pullback(tw_real.bundle, q)
    lam = left_regular(g)
    images = []
    for s in g.elements():
        row = []
        for i in range(t.algebra.dim):
            c, coeff = twisted_normal_form(t, t.algebra.basis[i], s)
            row.append(np.kron(_image(tw_real, c, t.algebra.coords(coeff)), lam[s]))
        images.append(row)
    iso = realization_isomorphism_report(semi, semi_real, pb, images, tol)
    dim_semi = semi_real.bundle.section_dimension()
    dim_pb = pb.section_dimension()
    return {
        "pass": iso["pass"] and dim_semi == dim_pb == g.order * t.algebra.dim,
        "iso": iso,
        "dim_semidirect": dim_semi,
        "dim_pullback": dim_pb,
    }


def induced_multiplier_family(t: TwistedAction, real: Realization) -> UnitaryMultiplierFamily:
    """The family u(n) = image of (tau(n^-1), n) on a concretized semidirect bundle.

    These are the unitaries witnessing that the semidirect bundle of a twisted
    action is a pull-back: u is a homomorphism on N, u(n) has order n, and
    a_s u(n) = u(s n s^-1) a_s.
    """
    g = t.group
    mats = {}
    for n in t.subgroup.members:
        mats[n] = _image(real, n, t.algebra.coords(t.tau[g.inv(n)]))
    return UnitaryMultiplierFamily(real.bundle, t.subgroup.members, mats)


def extract_twist(t: TwistedAction, real: Realization, u: UnitaryMultiplierFamily,
                  tol: float = 1e-8) -> dict:
    """tau(n) = (1, n) u(n^-1), pulled back to coefficients of the algebra.

    t supplies the action (any twist it carries is ignored), real is the
    concretized semidirect bundle of t, and u is a verified multiplier family
    over a normal subgroup of G living on real.bundle. The extracted family is
    checked to satisfy the full twisted-action identities before returning.
    """
    report = verify_multiplier_family(u, max(tol, 1e-8))
    if not report["pass"]:
        raise InvalidMultiplierFamily(str(report["violations"][0]))
    g, alg = t.group, t.algebra
    unit_c = alg.coords(unit_element(alg))
    stack0 = np.stack([m.ravel() for m in real.images[0]]).T
    tau = {}
    for n in sorted(u.domain):
        mat = _image(real, n, unit_c) @ u.mat(g.inv(n))
        c, *_ = np.linalg.lstsq(stack0, mat.ravel(), rcond=None)
        if hs_norm(stack0 @ c - mat.ravel()) > tol * max(1.0, hs_norm(mat)):
            raise MultiplierNotOrderCompatible(
                f"(1,{n}) u({g.inv(n)}) leaves the unit fiber")
        tau[n] = alg.from_coords(c)
    action = TwistedAction(alg, g, NormalSubgroup(g, tuple(sorted(u.domain))),
                           t.alpha, tau)
    require_twisted_action(action, tol)
    return tau


# pull-back / quotient round trips


def pullback_quotient_roundtrip(d: GradedBundle, q: Quotient,
                                tol: float = 1e-8) -> dict:
    """Pull d back along G -> G/N, collapse by the canonical family, compare.

    The orbit of the generator (d_i, s) meets the section fiber at d_i tensor
    lambda(c(sN)) / sqrt|G|, so on Hilbert-Schmidt bases the identification
    with d is the coordinate map scaled by 1/sqrt|G|.
    """
    p = pullback(d, q)
    u = canonical_multiplier_family(p, q)
    quo = quotient_bundle(p, u, q, tol)
    real = concretize(quo, tol)
    scale = 1.0 / np.sqrt(q.group.order)
    images = [[scale * m for m in d.fiber(c).basis_list()]
              for c in q.quotient_group.elements()]
    iso = realization_isomorphism_report(quo, real, d, images, tol)
    return {"pass": iso["pass"], "iso": iso,
            "fiber_dims": {"original": list(d.fiber_dims()),
                           "recovered": list(real.bundle.fiber_dims())}}


def quotient_pullback_roundtrip(a: GradedBundle, u: UnitaryMultiplierFamily,
                                q: Quotient | None = None,
                                tol: float = 1e-8) -> dict:
    """Collapse a along u, concretize, pull back, and compare with a itself.

    The comparison map sends a_s to (class of a_s u(n_s)*, s) where n_s moves s
    to the coset section; it is exactly multiplicative because the collapsed
    structure constants were read off the very same representatives.
    """
    g = a.group
    if q is None:
        q = quotient(g, NormalSubgroup(g, tuple(sorted(u.domain))))
    quo = quotient_bundle(a, u, q, tol)
    real = concretize(quo, tol)
    pb = pullback(real.bundle, q)
    lam = left_regular(g)

    def phi(s, mat):
        c = q.coset_of[s]
        rep = mat @ dagger(u.mat(q.n_part(s)))
        coords = a.fiber(q.section[c]).coords(rep)
        return np.kron(_image(real, c, coords), lam[s])

    iso = bundle_isomorphism_report(a, pb, phi, tol)
    return {"pass": iso["pass"], "iso": iso,
            "quotient_fiber_dims": list(real.bundle.fiber_dims())}


# graded ideals and G-simplicity


def graded_ideals(sa: SectionAlgebra, tol: float = 1e-8) -> list[MatrixSubspace]:
    """All grading-invariant two-sided ideals of the section algebra.

    Ideals of a finite-dimensional C*-algebra are sums of minimal central
    summands, so only 2^blocks candidates exist; a candidate is graded exactly
    when every fiber component of each of its elements stays inside it. The
    zero ideal and the whole algebra are always included.
    """
    total = sa.total
    projs = minimal_central_projections(total, tol)
    found = []
    for mask in range(1 << len(projs)):
        if mask == 0:
            found.append(MatrixSubspace(
                total.ambient_dim,
                np.zeros((0, total.ambient_dim, total.ambient_dim), dtype=complex)))
            continue
        p = sum(projs[i] for i in range(len(projs)) if mask >> i & 1)
        ideal = orthonormalize([p @ m for m in total.basis_list()],
                               ambient_dim=total.ambient_dim, tol=tol)
        graded = True
        for m in ideal.basis_list():
            for comp in sa.components(m, tol):
                if hs_norm(comp) > tol and not ideal.contains(comp, tol):
                    graded = False
                    break
            if not graded:
                break
        if graded:
            found.append(ideal)
    found.sort(key=lambda i: i.dim)
    return found


def is_g_simple(sa: SectionAlgebra, tol: float = 1e-8) -> bool:
    """True when the only graded ideals are 0 and the whole algebra."""
    ideals = graded_ideals(sa, tol)
    return len(ideals) == 2 and ideals[0].dim == 0 and ideals[-1].dim == sa.total.dim


def crossed_section_algebra(t: TwistedAction, tol: float = DEFAULT_TOL) -> SectionAlgebra:
    """Section algebra of the concretized semidirect bundle of an action."""
    real = concretize(semidirect_bundle(t, tol), tol)
    return section_algebra(real.bundle, tol)


# transformation systems and the stabilizer obstruction


@dataclass(frozen=True)
class GSetAction:
    """A left action of G on {0, ..., size-1}; perm[s][x] is s.x."""

    group: FiniteGroup
    size: int
    perm: tuple

    def __post_init__(self) -> None:
        g = self.group
        perm = tuple(tuple(int(x) for x in row) for row in self.perm)
        if len(perm) != g.order or any(len(row) != self.size for row in perm):
            raise ShapeMismatch("permutation table must be |G| rows of the set size")
        ident = tuple(range(self.size))
        for row in perm:
            if tuple(sorted(row)) != ident:
                raise InvalidAction("rows must be permutations of the set")
        if perm[0] != ident:
            raise InvalidAction("the identity must act trivially")
        for s in g.elements():
            for t in g.elements():
                st = g.mul(s, t)
                if any(perm[st][x] != perm[s][perm[t][x]] for x in range(self.size)):
                    raise InvalidAction(f"perm is not a homomorphism at ({s},{t})")
        object.__setattr__(self, "perm", perm)

    def stabilizer(self, x: int) -> tuple[int, ...]:
        return tuple(s for s in self.group.elements() if self.perm[s][x] == x)

    def orbits(self) -> list[tuple[int, ...]]:
        seen = [False] * self.size
        out = []
        for x in range(self.size):
            if seen[x]:
                continue
            orb = sorted({self.perm[s][x] for s in self.group.elements()})
            for y in orb:
                seen[y] = True
            out.append(tuple(orb))
        return out


def coset_action(g: FiniteGroup, members) -> GSetAction:
    """Left translation of G on the left cosets of a subgroup (not nec. normal)."""
    mem = tuple(sorted({int(m) for m in members}))
    if not is_subgroup(g, mem):
        raise NotASubgroup("coset space needs a genuine subgroup")
    coset_index = {}
    reps = []
    for s in g.elements():
        c = tuple(sorted(g.mul(s, h) for h in mem))
        if c not in coset_index:
            coset_index[c] = None
            reps.append(c)
    reps.sort(key=lambda c: c[0])
    for i, c in enumerate(reps):
        coset_index[c] = i
    of = [coset_index[tuple(sorted(g.mul(s, h) for h in mem))] for s in g.elements()]
    perm = tuple(tuple(of[g.mul(t, c[0])] for c in reps) for t in g.elements())
    return GSetAction(g, len(reps), perm)


def translation_action(g: FiniteGroup) -> GSetAction:
    """G acting on itself by left translation; always free."""
    return coset_action(g, (0,))


def trivial_gset_action(g: FiniteGroup, size: int) -> GSetAction:
    return GSetAction(g, size, tuple(tuple(range(size)) for _ in g.elements()))


def transformation_system(act: GSetAction) -> TwistedAction:
    """Functions on the G-set as diagonal matrices, permuted by the action."""
    n = act.size
    basis = np.zeros((n, n, n), dtype=complex)
    for x in range(n):
        basis[x, x, x] = 1.0
    algebra = MatrixSubspace(n, basis)
    alpha = np.zeros((act.group.order, n, n), dtype=complex)
    for s in act.group.elements():
        for x in range(n):
            alpha[s, act.perm[s][x], x] = 1.0
    return plain_action(algebra, act.group, alpha)


def invariant_ideal_count(act: GSetAction) -> int:
    """Number of action-invariant ideals of the function algebra (0 and all included).

    Ideals of the diagonal algebra are supported on subsets of the set, and an
    invariant ideal is a union of orbits.
    """
    return 2 ** len(act.orbits())


def stabilizer_obstruction(act: GSetAction, n: NormalSubgroup) -> dict:
    """Can the dual grading of the transformation system come from G/N?

    A twist over N would implement the restricted action by inner unitaries,
    forcing N to stabilize every point. induced_possible reports whether N
    sits inside the kernel of the action; a trivial kernel rules out every
    nontrivial quotient at once.
    """
    if act.group.table != n.group.table:
        raise GroupMismatch("action and subgroup live on different groups")
    if n.is_trivial():
        raise TrivialN("the obstruction concerns nontrivial subgroups")
    stabs = [set(act.stabilizer(x)) for x in range(act.size)]
    kernel = sorted(set.intersection(*stabs)) if stabs else list(act.group.elements())
    possible = set(n.members) <= set(kernel)
    return {
        "kernel": tuple(kernel),
        "kernel_trivial": tuple(kernel) == (0,),
        "induced_possible": possible,
        "stabilizers": [tuple(sorted(s)) for s in stabs],
        "verdict": ("compatible with weak induction from the quotient" if possible
                    else "not weakly induced from the quotient"),
    }
