"""The pre-imprimitivity bimodule linking the two crossed products.

Given a bundle D over G/N, the space X0 of fiber-valued functions on
(G/N) x G carries a left action of B0 (triples (d, s, t), s, t in G,
d in D_{sN}) and a right action of C0 (pairs (d, kN, lN)), together with
compatible inner products. All four generator formulas, the translation
action gamma, and the eight bimodule axioms are implemented and checked
here; positivity and boundedness are read off faithful realizations of B0
and C0 inside matrix algebras.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundles import GradedBundle, pullback
from .errors import (
    AxiomViolation,
    FiberMismatch,
    GroupMismatch,
    NonUnitalUnitFiber,
    NotUnital,
)
from .groups import Quotient, left_regular
from .matrices import (
    DEFAULT_TOL,
    dagger,
    hs_norm,
    is_psd,
    op_norm,
    orthonormalize,
    unit_element,
    wedderburn_block_count,
)
from .sections import crossed_product

_ZERO_CUT = 1e-14


def _clean(coeffs: dict) -> dict:
    scale = max((float(hs_norm(m)) for m in coeffs.values()), default=0.0)
    return {key: m for key, m in coeffs.items()
            if hs_norm(m) > _ZERO_CUT * max(1.0, scale)}


def _merge(a: dict, b: dict, zb=1.0) -> dict:
    out = {k: np.array(m) for k, m in a.items()}
    for key, m in b.items():
        out[key] = out.get(key, 0.0) + zb * m
    return _clean(out)


@dataclass(frozen=True, eq=False)
class BimoduleElement:
    """Finitely supported map (coset k, t in G) -> matrix in D.fiber(k)."""

    q: Quotient
    d: GradedBundle
    coeffs: dict

    def plus(self, other: "BimoduleElement") -> "BimoduleElement":
        _same_setup(self, other)
        return BimoduleElement(self.q, self.d, _merge(self.coeffs, other.coeffs))

    def scaled(self, z: complex) -> "BimoduleElement":
        return BimoduleElement(self.q, self.d,
                               _clean({k: z * m for k, m in self.coeffs.items()}))


@dataclass(frozen=True, eq=False)
class AlgebraElementB:
    """Finitely supported map (s, t) in G x G -> matrix in D.fiber(sN)."""

    q: Quotient
    d: GradedBundle
    coeffs: dict

    def plus(self, other: "AlgebraElementB") -> "AlgebraElementB":
        _same_setup(self, other)
        return AlgebraElementB(self.q, self.d, _merge(self.coeffs, other.coeffs))

    def scaled(self, z: complex) -> "AlgebraElementB":
        return AlgebraElementB(self.q, self.d,
                               _clean({k: z * m for k, m in self.coeffs.items()}))


@dataclass(frozen=True, eq=False)
class AlgebraElementC:
    """Finitely supported map (kN, lN) -> matrix in D.fiber(k)."""

    q: Quotient
    d: GradedBundle
    coeffs: dict

    def plus(self, other: "AlgebraElementC") -> "AlgebraElementC":
        _same_setup(self, other)
        return AlgebraElementC(self.q, self.d, _merge(self.coeffs, other.coeffs))

    def scaled(self, z: complex) -> "AlgebraElementC":
        return AlgebraElementC(self.q, self.d,
                               _clean({k: z * m for k, m in self.coeffs.items()}))


def _same_setup(a, b) -> None:
    if a.q.group.table != b.q.group.table or a.q.subgroup.members != b.q.subgroup.members:
        raise GroupMismatch("elements built over different quotient data")


def _check_base(q: Quotient, d: GradedBundle) -> None:
    if d.group.table != q.quotient_group.table:
        raise GroupMismatch("base bundle is not graded by the quotient group")


def module_element(q: Quotient, d: GradedBundle, coeffs: dict,
                   tol: float = DEFAULT_TOL) -> BimoduleElement:
    _check_base(q, d)
    for (k, t), m in coeffs.items():
        if not d.fiber(k).contains(np.asarray(m, dtype=complex), max(tol, 1e-8)):
            raise FiberMismatch(f"coefficient at ({k},{t}) is not in fiber {k}")
    return BimoduleElement(q, d, _clean({k: np.asarray(m, dtype=complex)
                                         for k, m in coeffs.items()}))


def algebra_element_b(q: Quotient, d: GradedBundle, coeffs: dict,
                      tol: float = DEFAULT_TOL) -> AlgebraElementB:
    _check_base(q, d)
    for (s, t), m in coeffs.items():
        k = q.coset_of[s]
        if not d.fiber(k).contains(np.asarray(m, dtype=complex), max(tol, 1e-8)):
            raise FiberMismatch(f"coefficient at ({s},{t}) is not in fiber {k}")
    return AlgebraElementB(q, d, _clean({k: np.asarray(m, dtype=complex)
                                         for k, m in coeffs.items()}))


def algebra_element_c(q: Quotient, d: GradedBundle, coeffs: dict,
                      tol: float = DEFAULT_TOL) -> AlgebraElementC:
    _check_base(q, d)
    for (k, l), m in coeffs.items():
        if not d.fiber(k).contains(np.asarray(m, dtype=complex), max(tol, 1e-8)):
            raise FiberMismatch(f"coefficient at ({k},{l}) is not in fiber {k}")
    return AlgebraElementC(q, d, _clean({k: np.asarray(m, dtype=complex)
                                         for k, m in coeffs.items()}))


# algebra operations


def b_mul(a: AlgebraElementB, b: AlgebraElementB) -> AlgebraElementB:
    _same_setup(a, b)
    g = a.q.group
    out: dict = {}
    for (s, t), m1 in a.coeffs.items():
        for (u, v), m2 in b.coeffs.items():
            if t != g.mul(u, v):
                continue
            key = (g.mul(s, u), v)
            out[key] = out.get(key, 0.0) + m1 @ m2
    return AlgebraElementB(a.q, a.d, _clean(out))


def b_star(a: AlgebraElementB) -> AlgebraElementB:
    g = a.q.group
    out: dict = {}
    for (s, t), m in a.coeffs.items():
        key = (g.inv(s), g.mul(s, t))
        out[key] = out.get(key, 0.0) + dagger(m)
    return AlgebraElementB(a.q, a.d, _clean(out))


def c_mul(a: AlgebraElementC, b: AlgebraElementC) -> AlgebraElementC:
    _same_setup(a, b)
    qg = a.q.quotient_group
    out: dict = {}
    for (k, l), m1 in a.coeffs.items():
        for (u, v), m2 in b.coeffs.items():
            if l != qg.mul(u, v):
                continue
            key = (qg.mul(k, u), v)
            out[key] = out.get(key, 0.0) + m1 @ m2
    return AlgebraElementC(a.q, a.d, _clean(out))


def c_star(a: AlgebraElementC) -> AlgebraElementC:
    qg = a.q.quotient_group
    out: dict = {}
    for (k, l), m in a.coeffs.items():
        key = (qg.inv(k), qg.mul(k, l))
        out[key] = out.get(key, 0.0) + dagger(m)
    return AlgebraElementC(a.q, a.d, _clean(out))


# the four generator formulas


def right_action(x: BimoduleElement, c: AlgebraElementC) -> BimoduleElement:
    """(d_sN, t) . (d_uN, vN) = (d_sN d_uN, t) when s^-1 t N = uvN."""
    _same_setup(x, c)
    q, qg = x.q, x.q.quotient_group
    out: dict = {}
    for (k, t), dx in x.coeffs.items():
        pos = qg.mul(qg.inv(k), q.coset_of[t])
        for (u, v), dc in c.coeffs.items():
            if pos != qg.mul(u, v):
                continue
            key = (qg.mul(k, u), t)
            out[key] = out.get(key, 0.0) + dx @ dc
    return BimoduleElement(x.q, x.d, _clean(out))


def left_action(b: AlgebraElementB, x: BimoduleElement) -> BimoduleElement:
    """(d_qN, q, r) . (d_sN, t) = (d_qN d_sN, qt) when r = t."""
    _same_setup(b, x)
    q, g, qg = b.q, b.q.group, b.q.quotient_group
    out: dict = {}
    for (s, t), db in b.coeffs.items():
        for (k, r), dx in x.coeffs.items():
            if t != r:
                continue
            key = (qg.mul(q.coset_of[s], k), g.mul(s, r))
            out[key] = out.get(key, 0.0) + db @ dx
    return BimoduleElement(x.q, x.d, _clean(out))


def rinner(x: BimoduleElement, y: BimoduleElement) -> AlgebraElementC:
    """<(d_sN, t), (d_uN, v)>_C = (d_sN* d_uN, u^-1 vN) when t = v.

    Conjugate-linear in x, linear in y.
    """
    _same_setup(x, y)
    q, qg = x.q, x.q.quotient_group
    out: dict = {}
    for (xk, xt), dx in x.coeffs.items():
        for (yk, yt), dy in y.coeffs.items():
            if xt != yt:
                continue
            key = (qg.mul(qg.inv(xk), yk), qg.mul(qg.inv(yk), q.coset_of[yt]))
            out[key] = out.get(key, 0.0) + dagger(dx) @ dy
    return AlgebraElementC(x.q, x.d, _clean(out))


def linner(x: BimoduleElement, y: BimoduleElement) -> AlgebraElementB:
    """<(d_sN, t), (d_uN, v)>_B = (d_sN d_uN*, tv^-1, v) when su^-1 N = tv^-1 N.

    Linear in x, conjugate-linear in y.
    """
    _same_setup(x, y)
    q, g, qg = x.q, x.q.group, x.q.quotient_group
    out: dict = {}
    for (xk, xt), dx in x.coeffs.items():
        for (yk, yt), dy in y.coeffs.items():
            w = g.mul(xt, g.inv(yt))
            if qg.mul(xk, qg.inv(yk)) != q.coset_of[w]:
                continue
            key = (w, yt)
            out[key] = out.get(key, 0.0) + dx @ dagger(dy)
    return AlgebraElementB(x.q, x.d, _clean(out))


# translations


def gamma(r: int, x: BimoduleElement) -> BimoduleElement:
    """gamma_r(d, t) = (d, t r^-1)."""
    g = x.q.group
    return BimoduleElement(x.q, x.d,
                           {(k, g.mul(t, g.inv(r))): m
                            for (k, t), m in x.coeffs.items()})


def dual_b(r: int, b: AlgebraElementB) -> AlgebraElementB:
    """(d, s, t) -> (d, s, t r^-1): the dual translation on B0."""
    g = b.q.group
    return AlgebraElementB(b.q, b.d,
                           {(s, g.mul(t, g.inv(r))): m
                            for (s, t), m in b.coeffs.items()})


def inflated_dual_c(r: int, c: AlgebraElementC) -> AlgebraElementC:
    """(d, kN, lN) -> (d, kN, l r^-1 N): the inflated dual translation."""
    q, qg = c.q, c.q.quotient_group
    rbar = q.coset_of[r]
    return AlgebraElementC(c.q, c.d,
                           {(k, qg.mul(l, qg.inv(rbar))): m
                            for (k, l), m in c.coeffs.items()})


# units, generators, coordinates


def unit_elements(q: Quotient, d: GradedBundle,
                  tol: float = DEFAULT_TOL) -> tuple[AlgebraElementB, AlgebraElementC]:
    """Exact identities of B0 and C0: unit-fiber units summed over a transversal."""
    _check_base(q, d)
    try:
        u = unit_element(d.fiber(0), tol)
    except NotUnital as exc:
        raise NonUnitalUnitFiber(str(exc)) from exc
    unit_b = AlgebraElementB(q, d, {(0, t): np.array(u) for t in q.group.elements()})
    unit_c = AlgebraElementC(q, d, {(0, l): np.array(u)
                                    for l in q.quotient_group.elements()})
    return unit_b, unit_c


def x_generators(q: Quotient, d: GradedBundle) -> list[BimoduleElement]:
    _check_base(q, d)
    return [BimoduleElement(q, d, {(k, t): m})
            for k in q.quotient_group.elements()
            for t in q.group.elements()
            for m in d.fiber(k).basis_list()]


def b_generators(q: Quotient, d: GradedBundle) -> list[AlgebraElementB]:
    _check_base(q, d)
    return [AlgebraElementB(q, d, {(s, t): m})
            for s in q.group.elements()
            for t in q.group.elements()
            for m in d.fiber(q.coset_of[s]).basis_list()]


def c_generators(q: Quotient, d: GradedBundle) -> list[AlgebraElementC]:
    _check_base(q, d)
    return [AlgebraElementC(q, d, {(k, l): m})
            for k in q.quotient_group.elements()
            for l in q.quotient_group.elements()
            for m in d.fiber(k).basis_list()]


def dimensions(q: Quotient, d: GradedBundle) -> dict:
    section = d.section_dimension()
    g, qn = q.group.order, q.quotient_group.order
    dim_b = g * sum(d.fiber(q.coset_of[s]).dim for s in q.group.elements())
    return {"dimX": g * section, "dimB": dim_b, "dimC": qn * section}


def _distance(a, b) -> float:
    keys = set(a.coeffs) | set(b.coeffs)
    out = 0.0
    for key in keys:
        m1 = a.coeffs.get(key)
        m2 = b.coeffs.get(key)
        if m1 is None:
            out = max(out, float(hs_norm(m2)))
        elif m2 is None:
            out = max(out, float(hs_norm(m1)))
        else:
            out = max(out, float(hs_norm(m1 - m2)))
    return out


def _coeff_vector(e, slots: dict, total: int, fiber_of) -> np.ndarray:
    vec = np.zeros(total, dtype=complex)
    for key, m in e.coeffs.items():
        start, fiber = slots[key], fiber_of(key)
        vec[start:start + fiber.dim] = fiber.coords(m)
    return vec


def _slot_table(keys, fiber_of):
    slots, total = {}, 0
    for key in keys:
        slots[key] = total
        total += fiber_of(key).dim
    return slots, total


def b_coords(b: AlgebraElementB) -> np.ndarray:
    q, d = b.q, b.d
    keys = [(s, t) for s in q.group.elements() for t in q.group.elements()]
    fiber_of = lambda key: d.fiber(q.coset_of[key[0]])
    slots, total = _slot_table(keys, fiber_of)
    return _coeff_vector(b, slots, total, fiber_of)


def c_coords(c: AlgebraElementC) -> np.ndarray:
    q, d = c.q, c.d
    keys = [(k, l) for k in q.quotient_group.elements()
            for l in q.quotient_group.elements()]
    fiber_of = lambda key: d.fiber(key[0])
    slots, total = _slot_table(keys, fiber_of)
    return _coeff_vector(c, slots, total, fiber_of)


def x_coords(x: BimoduleElement) -> np.ndarray:
    q, d = x.q, x.d
    keys = [(k, t) for k in q.quotient_group.elements() for t in q.group.elements()]
    fiber_of = lambda key: d.fiber(key[0])
    slots, total = _slot_table(keys, fiber_of)
    return _coeff_vector(x, slots, total, fiber_of)


# faithful realizations (positivity and norms live here)


def realize_b(b: AlgebraElementB) -> np.ndarray:
    """(d, s, t) -> d tensor lambda(s) tensor E_{st,t}: a faithful *-homomorphism."""
    g = b.q.group
    lam = left_regular(g)
    n, m = g.order, b.d.ambient_dim
    out = np.zeros((m * n * n, m * n * n), dtype=complex)
    for (s, t), mat in b.coeffs.items():
        e = np.zeros((n, n), dtype=complex)
        e[g.mul(s, t), t] = 1.0
        out += np.kron(np.kron(mat, lam[s]), e)
    return out


def realize_c(c: AlgebraElementC) -> np.ndarray:
    """(d, kN, lN) -> d tensor E_{klN,lN}: a faithful *-homomorphism."""
    qg = c.q.quotient_group
    n, m = qg.order, c.d.ambient_dim
    out = np.zeros((m * n, m * n), dtype=complex)
    for (k, l), mat in c.coeffs.items():
        e = np.zeros((n, n), dtype=complex)
        e[qg.mul(k, l), l] = 1.0
        out += np.kron(mat, e)
    return out


def _random_x(q, d, rng) -> BimoduleElement:
    coeffs = {}
    for k in q.quotient_group.elements():
        fk = d.fiber(k)
        for t in q.group.elements():
            c = rng.normal(size=fk.dim) + 1j * rng.normal(size=fk.dim)
            coeffs[(k, t)] = fk.from_coords(c)
    return BimoduleElement(q, d, _clean(coeffs))


def _random_b(q, d, rng) -> AlgebraElementB:
    coeffs = {}
    for s in q.group.elements():
        fk = d.fiber(q.coset_of[s])
        for t in q.group.elements():
            c = rng.normal(size=fk.dim) + 1j * rng.normal(size=fk.dim)
            coeffs[(s, t)] = fk.from_coords(c)
    return AlgebraElementB(q, d, _clean(coeffs))


def _random_c(q, d, rng) -> AlgebraElementC:
    coeffs = {}
    for k in q.quotient_group.elements():
        fk = d.fiber(k)
        for l in q.quotient_group.elements():
            c = rng.normal(size=fk.dim) + 1j * rng.normal(size=fk.dim)
            coeffs[(k, l)] = fk.from_coords(c)
    return AlgebraElementC(q, d, _clean(coeffs))


def verify_imprimitivity(q: Quotient, d: GradedBundle, tol: float = 1e-8,
                         samples: int = 4) -> dict:
    """The eight bimodule axioms, exhaustively on generators plus random triples.

    Items: (i) action associativity and commutation, (ii) module maps respect
    the inner products, (iii) adjoint symmetry, (iv) linearity sides,
    (v) x<y,z>_C = <x,y>_B z, (vi) fullness by rank, (vii) positivity in the
    realizations, (viii) bounded action inequalities.
    """
    _check_base(q, d)
    rng = np.random.default_rng(29)
    xs = x_generators(q, d)
    bs = b_generators(q, d)
    cs = c_generators(q, d)
    dims = dimensions(q, d)

    def triples(pool_a, pool_b, pool_c, count):
        for _ in range(count):
            yield (pool_a(q, d, rng), pool_b(q, d, rng), pool_c(q, d, rng))

    res_i = 0.0
    for b1 in bs:
        for b2 in bs:
            for x in xs:
                res_i = max(res_i, _distance(left_action(b_mul(b1, b2), x),
                                             left_action(b1, left_action(b2, x))))
    for x in xs:
        for c1 in cs:
            for c2 in cs:
                res_i = max(res_i, _distance(right_action(x, c_mul(c1, c2)),
                                             right_action(right_action(x, c1), c2)))
    for b1 in bs:
        for x in xs:
            for c1 in cs:
                res_i = max(res_i, _distance(right_action(left_action(b1, x), c1),
                                             left_action(b1, right_action(x, c1))))
    for b1, x, c1 in triples(_random_b, _random_x, _random_c, samples):
        res_i = max(res_i, _distance(right_action(left_action(b1, x), c1),
                                     left_action(b1, right_action(x, c1))))

    res_ii = 0.0
    for b1 in bs:
        for x in xs:
            for y in xs:
                res_ii = max(res_ii, _distance(linner(left_action(b1, x), y),
                                               b_mul(b1, linner(x, y))))
    for x in xs:
        for y in xs:
            for c1 in cs:
                res_ii = max(res_ii, _distance(rinner(x, right_action(y, c1)),
                                               c_mul(rinner(x, y), c1)))

    res_iii = 0.0
    for x in xs:
        for y in xs:
            res_iii = max(res_iii, _distance(b_star(linner(x, y)), linner(y, x)),
                          _distance(c_star(rinner(x, y)), rinner(y, x)))

    res_iv = 0.0
    for _ in range(samples):
        x1, x2 = _random_x(q, d, rng), _random_x(q, d, rng)
        y = _random_x(q, d, rng)
        z1, z2 = rng.normal() + 1j * rng.normal(), rng.normal() + 1j * rng.normal()
        combo = x1.scaled(z1).plus(x2.scaled(z2))
        res_iv = max(res_iv, _distance(
            linner(combo, y), linner(x1, y).scaled(z1).plus(linner(x2, y).scaled(z2))))
        res_iv = max(res_iv, _distance(
            rinner(y, combo), rinner(y, x1).scaled(z1).plus(rinner(y, x2).scaled(z2))))
        res_iv = max(res_iv, _distance(
            rinner(combo, y),
            rinner(x1, y).scaled(np.conj(z1)).plus(rinner(x2, y).scaled(np.conj(z2)))))
        res_iv = max(res_iv, _distance(
            linner(y, combo),
            linner(y, x1).scaled(np.conj(z1)).plus(linner(y, x2).scaled(np.conj(z2)))))

    res_v = 0.0
    for x in xs:
        for y in xs:
            for z in xs:
                res_v = max(res_v, _distance(right_action(x, rinner(y, z)),
                                             left_action(linner(x, y), z)))

    stack_c = np.stack([c_coords(rinner(x, y)) for x in xs for y in xs])
    stack_b = np.stack([b_coords(linner(x, y)) for x in xs for y in xs])
    rank_c = np.linalg.matrix_rank(stack_c, tol=1e-9 * max(1.0, float(np.abs(stack_c).max())))
    rank_b = np.linalg.matrix_rank(stack_b, tol=1e-9 * max(1.0, float(np.abs(stack_b).max())))
    full_ok = (rank_c == dims["dimC"]) and (rank_b == dims["dimB"])

    min_eig = 0.0
    pos_ok = True
    for x in xs + [_random_x(q, d, rng) for _ in range(samples)]:
        for mat in (realize_c(rinner(x, x)), realize_b(linner(x, x))):
            mat = (mat + dagger(mat)) / 2
            w = np.linalg.eigvalsh(mat) if mat.size else np.zeros(1)
            low = float(w[0]) / max(1.0, float(np.abs(w).max()))
            min_eig = min(min_eig, low)
            pos_ok = pos_ok and is_psd(mat, tol)

    res_viii = 0.0
    norm_b = {id(b): op_norm(realize_b(b)) for b in bs}
    for b1 in bs:
        nb = norm_b[id(b1)]
        for x in xs:
            lhs = realize_c(rinner(left_action(b1, x), left_action(b1, x)))
            rhs = nb * nb * realize_c(rinner(x, x))
            gap = (rhs - lhs + dagger(rhs - lhs)) / 2
            w = np.linalg.eigvalsh(gap)
            res_viii = max(res_viii, max(0.0, -float(w[0])))
    for c1 in cs:
        nc = op_norm(realize_c(c1))
        for x in xs:
            lhs = realize_b(linner(right_action(x, c1), right_action(x, c1)))
            rhs = nc * nc * realize_b(linner(x, x))
            gap = (rhs - lhs + dagger(rhs - lhs)) / 2
            w = np.linalg.eigvalsh(gap)
            res_viii = max(res_viii, max(0.0, -float(w[0])))

    items = {
        "i_bimodule": {"pass": res_i <= tol, "max_residual": res_i},
        "ii_action_compatibility": {"pass": res_ii <= tol, "max_residual": res_ii},
        "iii_adjoint_symmetry": {"pass": res_iii <= tol, "max_residual": res_iii},
        "iv_linearity": {"pass": res_iv <= tol, "max_residual": res_iv},
        "v_inner_product_link": {"pass": res_v <= tol, "max_residual": res_v},
        "vi_fullness": {"pass": bool(full_ok), "rank_b": int(rank_b),
                        "rank_c": int(rank_c), "dim_b": dims["dimB"],
                        "dim_c": dims["dimC"]},
        "vii_positivity": {"pass": bool(pos_ok), "min_relative_eigenvalue": min_eig},
        "viii_boundedness": {"pass": res_viii <= tol, "max_defect": res_viii},
    }
    violations = [{"item": name, "detail": data} for name, data in items.items()
                  if not data["pass"]]
    return {"pass": not violations, "items": items, "violations": violations}


def gamma_equivariance_report(q: Quotient, d: GradedBundle,
                              tol: float = 1e-10) -> dict:
    """The two displayed identities for gamma, on all generators and all r."""
    _check_base(q, d)
    xs = x_generators(q, d)
    cs = c_generators(q, d)
    res_b, res_c, res_act = 0.0, 0.0, 0.0
    g = q.group
    for r in g.elements():
        for x in xs:
            for y in xs:
                res_b = max(res_b, _distance(linner(gamma(r, x), gamma(r, y)),
                                             dual_b(r, linner(x, y))))
            for c in cs:
                res_act = max(res_act, _distance(gamma(r, right_action(x, c)),
                                                 right_action(gamma(r, x),
                                                              inflated_dual_c(r, c))))
        for r2 in g.elements():
            for x in xs[:2]:
                res_c = max(res_c, _distance(gamma(r, gamma(r2, x)),
                                             gamma(g.mul(r, r2), x)))
    checks = {
        "linner_equivariance": {"pass": res_b <= tol, "max_residual": res_b},
        "right_action_equivariance": {"pass": res_act <= tol, "max_residual": res_act},
        "group_action": {"pass": res_c <= tol, "max_residual": res_c},
    }
    return {"pass": all(c["pass"] for c in checks.values()), "checks": checks}


def morita_report(q: Quotient, d: GradedBundle, tol: float = 1e-8) -> dict:
    """Dimensions and Wedderburn block counts of the two crossed products.

    The block counts are computed from the concrete realizations; equality is
    the finite-dimensional shadow of the Morita equivalence. AxiomViolation
    if the bimodule axioms do not hold.
    """
    report = verify_imprimitivity(q, d, tol)
    if not report["pass"]:
        raise AxiomViolation(f"imprimitivity axioms failed: {report['violations'][0]}")
    dims = dimensions(q, d)
    span_b = orthonormalize([realize_b(b) for b in b_generators(q, d)])
    blocks_b = wedderburn_block_count(span_b)
    blocks_c = wedderburn_block_count(crossed_product(d).total)
    return {
        "dimB": dims["dimB"], "dimC": dims["dimC"], "dimX": dims["dimX"],
        "blocksB": blocks_b, "blocksC": blocks_c,
        "equivalent": bool(blocks_b == blocks_c),
    }


def pullback_crossed_dimension(q: Quotient, d: GradedBundle) -> int:
    """dim B0 recomputed through the pull-back bundle, as a cross-check."""
    p = pullback(d, q)
    return q.group.order * p.section_dimension()
