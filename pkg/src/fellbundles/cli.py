"""JSON command-line front end.

Bundle specs, multiplier families, witnesses, and actions are read from
JSON files; every command emits a key-sorted JSON report, so repeated runs
produce byte-identical output.  Exit codes separate mathematical failures
(1, report still written) from input problems (2).

A bundle spec looks like

    {"schema": "fellbundle/1",
     "group": {"kind": "cyclic", "n": 2},
     "ambient_dim": 2,
     "fibers": {"0": [[[[1,0],[0,0]],[[0,0],[1,0]]]], "1": [...]}}

with matrices as row-major nests of [re, im] pairs; unlisted fibers are
zero-dimensional.  Group descriptors on the command line use colon grammar:
cyclic:N, dihedral:N, symmetric:N, or table:FILE.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import approximation as approx
from . import bundles, duality, groups, imprimitivity, sections
from .errors import FellBundleError, ParseError
from .matrices import op_norm, orthonormalize, unit_element

SCHEMA = "fellbundle/1"
DEFAULT_CLI_TOL = 1e-9

COMMANDS = ("verify", "pullback", "crossed", "imprimitivity", "landstad",
            "olesen-pedersen", "gsimple", "obstruction", "ep", "report")


# serialization


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def decode_matrix(obj, field: str) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{field}: not a numeric matrix: {exc}") from exc
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ParseError(f"{field}: matrices are row-major nests of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _decode_square(obj, n: int, field: str) -> np.ndarray:
    m = decode_matrix(obj, field)
    if m.shape != (n, n):
        raise ParseError(f"{field}: expected a {n}x{n} matrix, got {m.shape[0]}x{m.shape[1]}")
    return m


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2:
            return encode_matrix(obj)
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def render_report(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


# input files


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc


def decode_group(obj, field: str = "group") -> groups.FiniteGroup:
    if isinstance(obj, str):
        return group_from_descriptor(obj)[0]
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError(f"{field}: expected a descriptor with a 'kind'")
    kind = obj["kind"]
    try:
        if kind == "cyclic":
            return groups.cyclic(int(obj["n"]))
        if kind == "dihedral":
            return groups.dihedral(int(obj["n"]))
        if kind == "symmetric":
            return groups.symmetric(int(obj["n"]))
        if kind == "table":
            return groups.from_table(obj["table"])
    except KeyError as exc:
        raise ParseError(f"{field}: missing field {exc} for kind '{kind}'") from exc
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{field}: {exc}") from exc
    raise ParseError(f"{field}: unknown group kind '{kind}'")


def group_from_descriptor(text: str) -> tuple[groups.FiniteGroup, dict]:
    """Colon grammar for --group; returns the group and a serializable descriptor."""
    kind, sep, rest = text.partition(":")
    if not sep:
        raise ParseError(f"--group: expected kind:value, got '{text}'")
    if kind in ("cyclic", "dihedral", "symmetric"):
        try:
            n = int(rest)
        except ValueError as exc:
            raise ParseError(f"--group: '{rest}' is not an integer") from exc
        desc = {"kind": kind, "n": n}
        return decode_group(desc), desc
    if kind == "table":
        data = _load_json(rest)
        table = data["table"] if isinstance(data, dict) else data
        g = decode_group({"kind": "table", "table": table})
        return g, {"kind": "table", "table": [list(row) for row in g.table]}
    raise ParseError(f"--group: unknown kind '{kind}'")


def parse_spec(path: str):
    """Read a bundle spec file; returns (group, bundle, options)."""
    data = _load_json(path)
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    schema = data.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise ParseError(f"{path}: unsupported schema '{schema}'")
    if "group" not in data:
        raise ParseError(f"{path}: missing group field")
    g = decode_group(data["group"])
    try:
        n = int(data["ambient_dim"])
    except KeyError as exc:
        raise ParseError(f"{path}: missing ambient_dim field") from exc
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: ambient_dim: {exc}") from exc
    if n <= 0:
        raise ParseError(f"{path}: ambient_dim must be positive")
    raw = data.get("fibers", {})
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: fibers must map element indices to matrix lists")
    spans: dict[int, list] = {}
    for key, mats in raw.items():
        try:
            s = int(key)
        except ValueError as exc:
            raise ParseError(f"{path}: fiber key '{key}' is not an element index") from exc
        if not 0 <= s < g.order:
            raise ParseError(f"{path}: fiber index {s} outside a group of order {g.order}")
        spans[s] = [_decode_square(m, n, f"fibers[{key}][{i}]")
                    for i, m in enumerate(mats)]
    fibers = tuple(orthonormalize(spans.get(s, []), ambient_dim=n)
                   for s in g.elements())
    bundle = bundles.GradedBundle(g, fibers)
    options: dict = {}
    if "normal_subgroup" in data:
        options["normal_subgroup"] = tuple(int(x) for x in data["normal_subgroup"])
    if "tolerance" in data:
        options["tolerance"] = float(data["tolerance"])
    return g, bundle, options


def bundle_to_spec(bundle: bundles.GradedBundle, group_desc: dict) -> dict:
    fibers = {str(s): [encode_matrix(b) for b in bundle.fiber(s).basis_list()]
              for s in bundle.group.elements() if bundle.fiber(s).dim}
    return {"schema": SCHEMA, "group": group_desc,
            "ambient_dim": bundle.ambient_dim, "fibers": fibers}


def _parse_members(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ParseError(f"--normal: expected a comma list of integers, got '{text}'") from exc


def _matrix_map(path: str, key: str, g: groups.FiniteGroup, n: int) -> dict:
    """Files like {"f": {"0": matrix, ...}} for witnesses and families."""
    data = _load_json(path)
    if not isinstance(data, dict) or key not in data or not isinstance(data[key], dict):
        raise ParseError(f"{path}: expected an object with a '{key}' map")
    out = {}
    for raw_s, m in data[key].items():
        try:
            s = int(raw_s)
        except ValueError as exc:
            raise ParseError(f"{path}: key '{raw_s}' is not an element index") from exc
        if not 0 <= s < g.order:
            raise ParseError(f"{path}: element {s} outside a group of order {g.order}")
        out[s] = _decode_square(m, n, f"{key}[{raw_s}]")
    return out


def _quotient_setup(args, d: bundles.GradedBundle):
    """Build G and G/N from --group/--normal and identify d's group with G/N."""
    if not args.group or not args.normal:
        raise ParseError("this command needs --group and --normal")
    g, desc = group_from_descriptor(args.group)
    try:
        q = groups.quotient(g, _parse_members(args.normal))
    except FellBundleError as exc:
        raise ParseError(f"--normal: {exc}") from exc
    if q.quotient_group.table != d.group.table:
        raise ParseError(
            "bundle group does not match the quotient of --group by --normal "
            f"(orders {d.group.order} and {q.quotient_group.order})")
    return g, q, desc


def parse_action_spec(path: str):
    """Twisted-action files for the olesen-pedersen command."""
    data = _load_json(path)
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    if data.get("schema", SCHEMA) != SCHEMA:
        raise ParseError(f"{path}: unsupported schema '{data.get('schema')}'")
    if data.get("kind", "twisted_action") != "twisted_action":
        raise ParseError(f"{path}: expected kind 'twisted_action'")
    for field in ("group", "algebra", "alpha"):
        if field not in data:
            raise ParseError(f"{path}: missing {field} field")
    g = decode_group(data["group"])
    mats = data["algebra"]
    if not isinstance(mats, list) or not mats:
        raise ParseError(f"{path}: algebra must be a nonempty list of matrices")
    first = decode_matrix(mats[0], "algebra[0]")
    if first.ndim != 2 or first.shape[0] != first.shape[1]:
        raise ParseError(f"{path}: algebra matrices must be square")
    k = first.shape[0]
    algebra = orthonormalize([_decode_square(m, k, f"algebra[{i}]")
                              for i, m in enumerate(mats)])
    members = tuple(int(x) for x in data.get("normal_subgroup", [0]))
    try:
        nsub = groups.NormalSubgroup(g, members)
    except FellBundleError as exc:
        raise ParseError(f"{path}: normal_subgroup: {exc}") from exc
    alpha = np.zeros((g.order, algebra.dim, algebra.dim), dtype=complex)
    raw_alpha = data["alpha"]
    if not isinstance(raw_alpha, dict):
        raise ParseError(f"{path}: alpha must map element indices to coordinate matrices")
    for s in g.elements():
        if str(s) not in raw_alpha:
            raise ParseError(f"{path}: alpha is missing element {s}")
        alpha[s] = _decode_square(raw_alpha[str(s)], algebra.dim, f"alpha[{s}]")
    tau = {}
    for raw_n, m in data.get("tau", {}).items():
        nn = int(raw_n)
        if nn not in members:
            raise ParseError(f"{path}: tau[{nn}] is not indexed by the normal subgroup")
        tau[nn] = _decode_square(m, k, f"tau[{raw_n}]")
    for nn in members:
        if nn not in tau:
            if nn == 0:
                try:
                    tau[0] = unit_element(algebra)
                except FellBundleError as exc:
                    raise ParseError(f"{path}: algebra has no unit for tau[0]") from exc
            else:
                raise ParseError(f"{path}: tau is missing element {nn}")
    return bundles.TwistedAction(algebra, g, nsub, alpha, tau)


def parse_gset_spec(path: str):
    """G-set action files for the obstruction command."""
    data = _load_json(path)
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    if data.get("kind", "gset_action") != "gset_action":
        raise ParseError(f"{path}: expected kind 'gset_action'")
    for field in ("group", "size", "perm"):
        if field not in data:
            raise ParseError(f"{path}: missing {field} field")
    g = decode_group(data["group"])
    size = int(data["size"])
    raw = data["perm"]
    if isinstance(raw, dict):
        try:
            rows = [raw[str(s)] for s in g.elements()]
        except KeyError as exc:
            raise ParseError(f"{path}: perm is missing element {exc}") from exc
    elif isinstance(raw, list):
        rows = raw
    else:
        raise ParseError(f"{path}: perm must be a list of rows or an element map")
    try:
        return duality.GSetAction(g, size, tuple(tuple(int(x) for x in r) for r in rows))
    except FellBundleError as exc:
        raise ParseError(f"{path}: {exc}") from exc


# commands


def _tol(args, options) -> float:
    if args.tol is not None:
        return float(args.tol)
    return float(options.get("tolerance", DEFAULT_CLI_TOL))


def cmd_verify(args) -> tuple[dict, int, str | None]:
    _, bundle, options = parse_spec(args.spec)
    rep = bundles.verify_fell_axioms(bundle, _tol(args, options))
    report = {"command": "verify", "pass": rep["pass"], "checks": rep["checks"],
              "violations": rep["violations"]}
    return report, 0 if rep["pass"] else 1, None


def cmd_pullback(args) -> tuple[dict, int, str | None]:
    _, d, options = parse_spec(args.spec)
    g, q, desc = _quotient_setup(args, d)
    tol = _tol(args, options)
    pb = bundles.pullback(d, q)
    rep = bundles.verify_fell_axioms(pb, max(tol, 1e-8))
    report = {
        "command": "pullback", "pass": rep["pass"],
        "group_order": g.order, "ambient_dim": pb.ambient_dim,
        "fiber_dims": list(pb.fiber_dims()),
        "section_dimension": pb.section_dimension(),
        "axioms": rep["checks"],
    }
    out = render_report(bundle_to_spec(pb, desc)) if args.output else None
    return report, 0 if rep["pass"] else 1, out


def cmd_crossed(args) -> tuple[dict, int, str | None]:
    _, bundle, options = parse_spec(args.spec)
    tol = _tol(args, options)
    cp = sections.crossed_product(bundle, max(tol, 1e-8))
    expected = bundle.group.order * bundle.section_dimension()
    residual = 0.0
    for s in bundle.group.elements():
        for a in bundle.fiber(s).basis_list():
            residual = max(residual, abs(op_norm(cp.j_fiber(s, a)) - op_norm(a)))
    ok = cp.total.dim == expected and residual <= max(tol, 1e-10)
    report = {
        "command": "crossed", "pass": ok,
        "ambient_dim": cp.ambient_dim,
        "crossed_dimension": cp.total.dim,
        "expected_dimension": expected,
        "fiber_dims": list(bundle.fiber_dims()),
        "isometry_residual": residual,
    }
    return report, 0 if ok else 1, None


def cmd_imprimitivity(args) -> tuple[dict, int, str | None]:
    _, d, options = parse_spec(args.spec)
    _, q, _ = _quotient_setup(args, d)
    tol = _tol(args, options)
    rep = imprimitivity.verify_imprimitivity(q, d, max(tol, 1e-8))
    report = {"command": "imprimitivity", "pass": rep["pass"], "items": rep["items"],
              "violations": rep["violations"]}
    if rep["pass"]:
        report["morita"] = imprimitivity.morita_report(q, d, max(tol, 1e-8))
        report["gamma"] = imprimitivity.gamma_equivariance_report(q, d)["pass"]
    return report, 0 if rep["pass"] else 1, None


def cmd_landstad(args) -> tuple[dict, int, str | None]:
    _, d, options = parse_spec(args.spec)
    g, q, _ = _quotient_setup(args, d)
    if not args.family:
        raise ParseError("landstad needs --family FILE with a 'u' matrix map")
    mats = _matrix_map(args.family, "u", g, d.ambient_dim)
    missing = [s for s in g.elements() if s not in mats]
    if missing:
        raise ParseError(f"--family: u is missing elements {missing}")
    u = bundles.UnitaryMultiplierFamily(d, tuple(g.elements()), mats)
    _, rep = duality.landstad_reconstruct(d, q, u, max(_tol(args, options), 1e-8))
    report = {
        "command": "landstad", "pass": rep["pass"],
        "coefficient_dim": rep["coefficient_dim"],
        "twist": {str(n): encode_matrix(m) for n, m in rep["twist"].items()},
        "isomorphism": rep["iso"]["pass"],
    }
    return report, 0 if rep["pass"] else 1, None


def cmd_olesen_pedersen(args) -> tuple[dict, int, str | None]:
    action = parse_action_spec(args.spec)
    tol = max(_tol(args, {}), 1e-8)
    fwd = duality.olesen_pedersen_forward(action, tol)
    real = bundles.concretize(bundles.semidirect_bundle(action, tol), tol)
    fam = duality.induced_multiplier_family(action, real)
    extracted = duality.extract_twist(action, real, fam, tol)
    residual = max(
        (float(np.linalg.norm(extracted[n] - action.tau[n])) for n in extracted),
        default=0.0)
    ok = fwd["pass"] and residual <= tol
    report = {
        "command": "olesen-pedersen", "pass": ok,
        "dim_semidirect": fwd["dim_semidirect"],
        "dim_pullback": fwd["dim_pullback"],
        "isomorphism": fwd["iso"]["pass"],
        "extracted_twist": {str(n): encode_matrix(m) for n, m in extracted.items()},
        "twist_residual": residual,
    }
    return report, 0 if ok else 1, None


def cmd_gsimple(args) -> tuple[dict, int, str | None]:
    _, bundle, options = parse_spec(args.spec)
    tol = max(_tol(args, options), 1e-8)
    sa = sections.section_algebra(bundle, tol)
    ideals = duality.graded_ideals(sa, tol)
    report = {
        "command": "gsimple", "pass": True,
        "section_dimension": sa.total.dim,
        "ideal_dims": [i.dim for i in ideals],
        "ideal_count": len(ideals),
        "is_g_simple": duality.is_g_simple(sa, tol),
    }
    return report, 0, None


def cmd_obstruction(args) -> tuple[dict, int, str | None]:
    act = parse_gset_spec(args.spec)
    if not args.normal:
        raise ParseError("obstruction needs --normal with the subgroup members")
    members = _parse_members(args.normal)
    if set(members) == {0}:
        raise ParseError("--normal must name a nontrivial subgroup")
    try:
        nsub = groups.NormalSubgroup(act.group, members)
    except FellBundleError as exc:
        raise ParseError(f"--normal: {exc}") from exc
    rep = duality.stabilizer_obstruction(act, nsub)
    report = {"command": "obstruction", "pass": True, **rep}
    return report, 0, None


def cmd_ep(args) -> tuple[dict, int, str | None]:
    _, bundle, options = parse_spec(args.spec)
    tol = _tol(args, options)
    if args.witness:
        vals = _matrix_map(args.witness, "f", bundle.group, bundle.ambient_dim)
        w = approx.ep_witness(bundle, vals, tol)
    else:
        w = approx.uniform_witness(bundle, tol)
    rep = approx.ep_defect(bundle, w, tol)
    report = {
        "command": "ep", "pass": True,
        "bound": rep["bound"], "defect": rep["defect"],
        "support": list(w.support),
    }
    return report, 0, None


def cmd_report(args) -> tuple[dict, int, str | None]:
    _, bundle, options = parse_spec(args.spec)
    tol = _tol(args, options)
    axioms = bundles.verify_fell_axioms(bundle, max(tol, 1e-8))
    report = {
        "command": "report", "pass": axioms["pass"],
        "group_order": bundle.group.order,
        "ambient_dim": bundle.ambient_dim,
        "fiber_dims": list(bundle.fiber_dims()),
        "axioms": axioms["checks"],
    }
    if not axioms["pass"]:
        report["violations"] = axioms["violations"]
        return report, 1, None
    cp = sections.crossed_product(bundle, max(tol, 1e-8), check=False)
    report["crossed_dimension"] = cp.total.dim
    report["expected_crossed_dimension"] = bundle.group.order * bundle.section_dimension()
    sa = sections.section_algebra(bundle, max(tol, 1e-8), check=False)
    ideals = duality.graded_ideals(sa, max(tol, 1e-8))
    report["ideal_dims"] = [i.dim for i in ideals]
    report["is_g_simple"] = duality.is_g_simple(sa, max(tol, 1e-8))
    report["amenability"] = approx.amenability_report(bundle, max(tol, 1e-8))
    ok = report["crossed_dimension"] == report["expected_crossed_dimension"]
    report["pass"] = bool(ok)
    return report, 0 if ok else 1, None


_HANDLERS = {
    "verify": cmd_verify,
    "pullback": cmd_pullback,
    "crossed": cmd_crossed,
    "imprimitivity": cmd_imprimitivity,
    "landstad": cmd_landstad,
    "olesen-pedersen": cmd_olesen_pedersen,
    "gsimple": cmd_gsimple,
    "obstruction": cmd_obstruction,
    "ep": cmd_ep,
    "report": cmd_report,
}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fellbundles",
        description="Verification toolkit for gradings of matrix algebras by finite groups.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")
    helps = {
        "verify": "run the grading axiom battery on a bundle spec",
        "pullback": "pull a bundle over G/N back to G (-o writes the bundle spec)",
        "crossed": "crossed-product dimension law and fiberwise isometry",
        "imprimitivity": "bimodule axioms and Morita report for a bundle over G/N",
        "landstad": "reconstruct a twisted action from a bundle plus --family",
        "olesen-pedersen": "semidirect vs pull-back comparison for a twisted action",
        "gsimple": "graded ideals of the section algebra",
        "obstruction": "stabilizer obstruction for a G-set action spec",
        "ep": "approximation-property bound and defect (--witness optional)",
        "report": "combined report: axioms, dimensions, ideals, amenability",
    }
    for name in COMMANDS:
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("spec", help="input JSON file")
        sp.add_argument("--tol", type=float, default=None,
                        help=f"numeric tolerance (default {DEFAULT_CLI_TOL})")
        sp.add_argument("--normal", default=None,
                        help="comma-separated members of the normal subgroup")
        sp.add_argument("--group", default=None,
                        help="group descriptor: cyclic:N, dihedral:N, symmetric:N, table:FILE")
        sp.add_argument("-o", "--output", default=None, help="output file")
        sp.add_argument("--format", choices=["json"], default="json")
        if name == "ep":
            sp.add_argument("--witness", default=None, help="witness file with an 'f' map")
        if name == "landstad":
            sp.add_argument("--family", default=None, help="family file with a 'u' map")
    return p


def _emit(text: str, args) -> None:
    # pullback's -o is reserved for the bundle spec, so its report always
    # goes to stdout; every other command writes the report to -o if given
    if args.output and args.command != "pullback":
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run_command(argv) -> int:
    try:
        args = _build_parser().parse_args(list(argv))
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        report, code, side_output = _HANDLERS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FellBundleError as exc:
        # a well-formed input failed a mathematical check
        report = {"command": args.command, "pass": False,
                  "error": type(exc).__name__, "detail": str(exc)}
        _emit(render_report(report), args)
        return 1
    if side_output is not None and args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(side_output)
    _emit(render_report(report), args)
    return code


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
