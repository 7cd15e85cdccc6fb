"""Command-line front end.

    baker --field 3 --poly "(x^2+1)^2 + y - y^3" points
    baker --field 2 --poly "x^4+1+y^2+y^3" resolve --mode full-charts --format json

Exit codes: 0 success, 1 I/O failure, 2 parse error, 3 failed precondition,
4 iteration guard exceeded.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field

from .fields import FieldError, FieldSpecError, minimal_polynomial, parse_field_spec
from .lattice import LatticeError, check_attached, delta_of_beta, interior_lattice_count, newton_polygon
from .laurent import LaurentError, ParseError, parse_polynomial, render
from .resolution import (
    DEFAULT_MAX_ITERATIONS,
    MODES,
    ResolutionError,
    build_sigma1,
    edge_restriction,
    galois_orbits,
    genus_report,
    node_status,
    nondegeneracy_check,
    points_at_infinity,
    regularity_report,
    run_resolution,
    smoothness_check,
)
from .superelliptic import SuperellipticError, SuperellipticInput, analyze, chart_descent, cross_check
from .unipoly import UniPoly, render_coeff, render_factored, render_unipoly

COMMANDS = ("polygon", "check", "resolve", "points", "genus", "superelliptic", "export")

EXIT_OK, EXIT_IO, EXIT_PARSE, EXIT_PRECONDITION, EXIT_GUARD = 0, 1, 2, 3, 4


class JobError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


@dataclass
class JobSpec:
    field: str
    polynomial: str
    command: str
    tower: object = None
    f: object = None
    mode: str = "algorithm1"
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    delta_overrides: dict = field(default_factory=dict)
    matrix_overrides: dict = field(default_factory=dict)
    assert_connected: bool = False
    format: str = "text"
    out: str = None
    s: int = None
    h: str = None
    h_poly: object = None
    cross_check: bool = False


def _add_options(p, suppress):
    # subcommand copies suppress defaults so options may precede or follow the command
    def opt(*names, **kw):
        if suppress:
            kw["default"] = argparse.SUPPRESS
        p.add_argument(*names, **kw)

    opt("--field", help="field spec: p, p^n, q, or p^n:c0,...,1")
    opt("--poly", help="Laurent polynomial in x, y")
    opt("--poly-file", help="file holding the polynomial")
    opt("--mode", choices=MODES, default="algorithm1")
    opt("--max-iterations", type=int, default=DEFAULT_MAX_ITERATIONS)
    opt("--delta-override", metavar="FILE", help="JSON table beta -> delta")
    opt("--matrix-override", metavar="FILE", help="JSON table beta -> 2x2 matrix")
    opt("--assert-connected", action="store_true", default=False)
    opt("--format", choices=("text", "json", "dot"), default="text")
    opt("--out", metavar="PATH")
    opt("--s", type=int)
    opt("--h", help="polynomial in x for y^s = h(x)")
    opt("--cross-check", action="store_true", default=False)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise JobError(f"usage error: {message}", EXIT_PARSE)


def build_parser():
    parser = _Parser(prog="baker", description="Newton-polygon resolution of curves over finite fields.")
    _add_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        _add_options(sub.add_parser(name), suppress=True)
    return parser


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise JobError(f"cannot read {path}: {exc}", EXIT_IO) from None
    except json.JSONDecodeError as exc:
        raise JobError(f"parse error in {path}: {exc}", EXIT_PARSE) from None


def _beta_key(k):
    if isinstance(k, str):
        return tuple(int(x) for x in k.replace("(", "").replace(")", "").split(","))
    return tuple(int(x) for x in k)


def load_overrides(data, kind):
    """Override tables as {beta: delta} or {beta: matrix}."""
    if isinstance(data, dict):
        items = list(data.items())
    else:
        items = [(e["beta"], e[kind]) for e in data]
    out = {}
    try:
        for k, v in items:
            beta = _beta_key(k)
            if len(beta) != 2:
                raise LatticeError(f"override key {k!r} is not a 2-vector")
            if kind == "delta":
                out[beta] = delta_of_beta(beta, {beta: tuple(int(x) for x in v)})
            else:
                M = tuple(tuple(int(x) for x in row) for row in v)
                out[beta] = check_attached(M, beta)
    except LatticeError as exc:
        raise JobError(f"invalid override: {exc}", EXIT_PRECONDITION) from None
    except (KeyError, TypeError, ValueError) as exc:
        raise JobError(f"malformed override table: {exc}", EXIT_PARSE) from None
    return out


def parse_job(argv):
    args = build_parser().parse_args(argv)
    if args.field is None:
        raise JobError("--field is required", EXIT_PARSE)
    try:
        tower = parse_field_spec(args.field)
    except FieldSpecError as exc:
        raise JobError(f"parse error: {exc}", EXIT_PARSE) from None
    except FieldError as exc:
        raise JobError(str(exc), EXIT_PRECONDITION) from None
    job = JobSpec(field=args.field, polynomial=None, command=args.command, tower=tower, mode=args.mode,
                  max_iterations=args.max_iterations, assert_connected=args.assert_connected,
                  format=args.format, out=args.out, s=args.s, h=args.h, cross_check=args.cross_check)
    if job.max_iterations < 0:
        raise JobError("--max-iterations must be non-negative", EXIT_PRECONDITION)
    if args.delta_override:
        job.delta_overrides = load_overrides(_read_json(args.delta_override), "delta")
    if args.matrix_override:
        job.matrix_overrides = load_overrides(_read_json(args.matrix_override), "matrix")
    if job.command == "superelliptic":
        if job.s is None or job.h is None:
            raise JobError("superelliptic needs --s and --h", EXIT_PARSE)
        h = _parse(job.h, tower, ("x",))
        if not h.is_polynomial():
            raise JobError("h must be a polynomial", EXIT_PRECONDITION)
        coeffs = [tower.zero(1)] * (h.degree_in(0) + 1 if not h.is_zero() else 0)
        for (i,), c in h.terms.items():
            coeffs[i] = c
        job.h_poly = UniPoly(tower, 1, coeffs)
        return job
    text = args.poly
    if args.poly_file:
        try:
            with open(args.poly_file) as fh:
                text = fh.read()
        except OSError as exc:
            raise JobError(f"cannot read {args.poly_file}: {exc}", EXIT_IO) from None
    if text is None:
        raise JobError("a polynomial is required (--poly or --poly-file)", EXIT_PARSE)
    job.polynomial = text.strip()
    job.f = _parse(job.polynomial, tower, ("x", "y"))
    if job.f.is_zero():
        raise JobError("the zero polynomial defines no curve", EXIT_PRECONDITION)
    return job


def _parse(text, tower, names):
    try:
        return parse_polynomial(text, tower, names)
    except ParseError as exc:
        raise JobError(str(exc), EXIT_PARSE) from None


# -- serialization ----------------------------------------------------------------

def elem_json(x):
    x = x.normalize()
    return {"level": x.level, "coords": list(x.coords), "text": render_coeff(x)}


def matrix_json(M):
    return [list(r) for r in M]


def _override_json(table):
    return [{"beta": list(k), "value": matrix_json(v) if isinstance(v[0], tuple) else list(v)}
            for k, v in sorted(table.items())]


def polygon_json(P):
    return {
        "vertices": [list(v) for v in P.vertices],
        "edges": [{"endpoints": [list(e) for e in E.endpoints], "normal": list(E.normal),
                   "lattice_length": E.lattice_length} for E in P.edges],
    }


def orbits_json(orbits, tower):
    return [{"members": [{"node": nid, "root": elem_json(r)} for nid, r in o.members],
             "residue_degree": o.residue_degree,
             "absolute_degree": o.absolute_degree,
             "source_level": o.source_level,
             "minimal_polynomial": render_unipoly(minimal_polynomial(o.members[0][1]))}
            for o in orbits]


def forest_json(forest, assert_connected=False):
    nodes = []
    for n in forest.nodes:
        entry = {
            "id": n.id,
            "level": n.level,
            "parent": n.parent,
            "root": elem_json(n.root) if n.root is not None else None,
            "beta": list(n.beta),
            "delta": list(n.delta),
            "F": render(n.F),
            "f_restrict": render_unipoly(n.f_restrict),
            "excluded_roots": [{"root": elem_json(r), "level": lv}
                               for r, lv in sorted(n.excluded.values(), key=lambda t: t[0].key())],
            "status": node_status(n),
        }
        if n.correction is not None:
            entry["correction"] = render_unipoly(n.correction, "Y")
        if n.matrix is not None:
            entry["meta"] = {"matrix": matrix_json(n.matrix),
                             "ideal_generators": [render(g) for g in n.generators]}
        nodes.append(entry)
    final = regularity_report(forest, forest.max_level)
    genus = genus_report(forest.input, forest, assert_connected)
    reports = {
        "terminated": forest.terminated,
        "iterations": forest.iterations,
        "outer_regular": final.outer_regular,
        "curve_regular": final.curve_regular,
        "interior_count": genus.interior_count,
    }
    if genus.exact_genus is not None:
        reports["genus"] = genus.exact_genus
    return {
        "field": forest.tower.spec(),
        "input": render(forest.input),
        "mode": forest.mode,
        "overrides": {"delta": _override_json(forest.delta_overrides or {}),
                      "matrix": _override_json(forest.matrix_overrides or {})},
        "polygon": polygon_json(forest.polygon),
        "nodes": nodes,
        "orbits": orbits_json(points_at_infinity(forest), forest.tower) if forest.terminated else [],
        "reports": reports,
    }


def _dot_quote(s):
    return '"' + s.replace('"', '\\"') + '"'


def forest_dot(forest):
    lines = ["digraph forest {", "  rankdir=TB;", "  node [shape=box];"]
    for n in forest.nodes:
        label = f"{n.id}\\nf| = {render_factored(n.f_restrict)}"
        lines.append(f"  {_dot_quote(n.id)} [label={_dot_quote(label)}];")
    for n in forest.nodes:
        if n.parent is not None:
            label = f"a={render_coeff(n.root)}, beta=({n.beta[0]},{n.beta[1]})"
            lines.append(f"  {_dot_quote(n.parent)} -> {_dot_quote(n.id)} [label={_dot_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export(forest, fmt, assert_connected=False):
    if fmt == "dot":
        return forest_dot(forest).encode()
    return (json.dumps(forest_json(forest, assert_connected), indent=2) + "\n").encode()


# -- text renderers -------------------------------------------------------------------

def _chain(forest, node_id):
    index = forest._index()
    parts, cur = [], index[node_id]
    while cur is not None:
        step = f"({cur.beta[0]},{cur.beta[1]})"
        if cur.parent is not None:
            step = f"a: {render_unipoly(minimal_polynomial(cur.root))} -> " + step
        parts.append(step)
        cur = index[cur.parent] if cur.parent is not None else None
    return " -> ".join(reversed(parts))


def render_points_table(forest, orbits):
    rows = [("orbit", "source chain", "minimal polynomial", "residue degree")]
    for k, o in enumerate(orbits, 1):
        nid, r = o.members[0]
        rows.append((str(k), f"{nid}: {_chain(forest, nid)}", render_unipoly(minimal_polynomial(r)),
                     str(o.residue_degree)))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    lines.append(f"{len(orbits)} orbits, {sum(o.residue_degree for o in orbits)} points over the closure")
    return "\n".join(lines)


def _polygon_text(f):
    P = newton_polygon(f.support())
    lines = [f"vertices: {' '.join(str(v) for v in P.vertices)}"]
    for k, e in enumerate(P.edges, 1):
        lines.append(f"E{k}: {e.endpoints[0]} -> {e.endpoints[1]}  normal {e.normal}  "
                     f"length {e.lattice_length}  f| = {render_factored(edge_restriction(f, e))}")
    lines.append(f"interior lattice points: {interior_lattice_count(P)}")
    return "\n".join(lines), P


def _forest_text(forest):
    lines = []
    for lv, ids in sorted(forest.levels().items()):
        lines.append(f"level {lv}: {len(ids)} chart(s)")
        for nid in ids:
            n = forest.node(nid)
            head = f"  {n.id}  beta={n.beta} delta={n.delta}"
            if n.root is not None:
                head += f" a={render_coeff(n.root)}"
            lines.append(head)
            lines.append(f"    F = {render(n.F)}")
            lines.append(f"    f| = {render_factored(n.f_restrict)}  [{node_status(n)}]")
            if n.correction is not None:
                lines.append(f"    correction c(Y) = {render_unipoly(n.correction, 'Y')}")
            if n.matrix is not None:
                lines.append(f"    M = {matrix_json(n.matrix)}")
                for g in n.generators:
                    lines.append(f"    ideal generator: {render(g)}")
    final = regularity_report(forest, forest.max_level)
    state = "terminated" if forest.terminated else "NOT terminated (iteration guard)"
    lines.append(f"{state} after {forest.iterations} iteration(s); "
                 f"outer_regular={final.outer_regular} curve_regular={final.curve_regular}")
    return "\n".join(lines)


# -- commands -----------------------------------------------------------------------

def _resolve(job):
    try:
        return run_resolution(job.f, job.mode, job.max_iterations, job.delta_overrides, job.matrix_overrides)
    except (ResolutionError, LatticeError, LaurentError) as exc:
        raise JobError(str(exc), EXIT_PRECONDITION) from None


def _points(forest):
    if not forest.terminated:
        raise JobError(f"iteration guard of {forest.max_iterations} exceeded before outer regularity", EXIT_GUARD)
    try:
        return points_at_infinity(forest)
    except ResolutionError as exc:
        raise JobError(str(exc), EXIT_PRECONDITION) from None


def cmd_polygon(job):
    text, P = _polygon_text(job.f)
    if job.format == "json":
        data = polygon_json(P)
        data["interior_count"] = interior_lattice_count(P)
        return json.dumps(data, indent=2)
    return text


def cmd_check(job):
    try:
        nd = nondegeneracy_check(job.f)
    except LaurentError as exc:
        raise JobError(str(exc), EXIT_PRECONDITION) from None
    sm_w = next((ff["witnesses"] for ff in nd.failing_faces if ff["face"] == "interior"), [])
    edges = [ff for ff in nd.failing_faces if ff["face"] == "edge"]
    if job.format == "json":
        return json.dumps({
            "smooth": nd.smooth,
            "singular_points": [[elem_json(x), elem_json(y)] for x, y in sm_w],
            "nondegenerate": nd.nondegenerate,
            "failing_edges": [{"index": ff["index"], "normal": list(ff["normal"]),
                               "multiple_roots": [{"root": elem_json(r), "multiplicity": m}
                                                  for r, m in ff["multiple_roots"]]} for ff in edges],
        }, indent=2)
    lines = [f"smooth in the torus: {'yes' if nd.smooth else 'no'}"]
    for x, y in sm_w:
        lines.append(f"  singular point: x = {render_coeff(x)}, y = {render_coeff(y)}")
    lines.append(f"nondegenerate: {'yes' if nd.nondegenerate else 'no'}")
    for ff in edges:
        roots = ", ".join(f"{render_unipoly(minimal_polynomial(r))} (mult {m})" for r, m in ff["multiple_roots"])
        lines.append(f"  edge E{ff['index'] + 1} normal {ff['normal']}: multiple roots {roots}")
    return "\n".join(lines)


def cmd_resolve(job):
    forest = _resolve(job)
    if job.format == "json":
        out = export(forest, "json", job.assert_connected).decode()
    elif job.format == "dot":
        out = forest_dot(forest)
    else:
        out = _forest_text(forest)
    if not forest.terminated:
        raise JobError(out.rstrip("\n"), EXIT_GUARD)
    return out


def cmd_points(job):
    forest = _resolve(job)
    orbits = _points(forest)
    if job.format == "json":
        return json.dumps({"orbits": orbits_json(orbits, forest.tower)}, indent=2)
    return render_points_table(forest, orbits)


def cmd_genus(job):
    try:
        if not smoothness_check(job.f).smooth:
            raise JobError("the curve is singular in the torus", EXIT_PRECONDITION)
        forest = build_sigma1(job.f, job.mode, job.delta_overrides, job.matrix_overrides)
    except (LatticeError, LaurentError) as exc:
        raise JobError(str(exc), EXIT_PRECONDITION) from None
    g = genus_report(job.f, forest, job.assert_connected)
    if job.format == "json":
        return json.dumps({"interior_count": g.interior_count, "pa_C1": g.pa_C1,
                           "curve_regular_C1": g.curve_regular_C1, "exact_genus": g.exact_genus,
                           "note": g.step_bound_note}, indent=2)
    lines = [f"interior lattice points: {g.interior_count}", f"arithmetic genus of C1: {g.pa_C1}",
             f"C1 regular: {'yes' if g.curve_regular_C1 else 'no'}"]
    if g.exact_genus is not None:
        lines.append(f"genus: {g.exact_genus}")
    lines.append(g.step_bound_note)
    return "\n".join(lines)


def _record_json(p):
    return {"source_level": p.source_level, "residue_degree": p.residue_degree,
            "path": [list(b) for b in p.path],
            "shift_minimal_polynomial": render_unipoly(p.shift_minpoly) if p.shift_minpoly is not None else None,
            "minimal_polynomial": render_unipoly(p.point_minpoly)}


def cmd_superelliptic(job):
    try:
        inp = SuperellipticInput(job.s, job.h_poly)
        rep = analyze(inp)
        descents = [chart_descent(inp, rr.root) for rr in rep.resolved_roots]
        cc = cross_check(inp) if job.cross_check else None
    except (SuperellipticError, ResolutionError) as exc:
        raise JobError(str(exc), EXIT_PRECONDITION) from None
    if job.format == "json":
        data = {
            "s": inp.s, "h": render_unipoly(inp.h, "x"), "m0": inp.m0, "d": inp.d,
            "edge_points": [_record_json(p) for p in rep.edge_points],
            "horizontal_points": [_record_json(p) for p in rep.horizontal_points],
            "resolved_points": [_record_json(p) for p in rep.resolved_points],
            "resolved_roots": [{"minimal_polynomial": render_unipoly(d.g, "x"), "multiplicity": d.m_r,
                                "a_r": elem_json(rr.a_r), "beta": list(rr.beta),
                                "restriction": render_unipoly(rr.restriction),
                                "descent": {"h_g": render_unipoly(d.h_g, "x"), "s_r": d.s_r,
                                            "delta": list(d.delta),
                                            "generators": [render(g) for g in d.generators]}}
                               for rr, d in zip(rep.resolved_roots, descents)],
            "outer_regular_level": rep.outer_regular_level,
        }
        if cc is not None:
            data["cross_check"] = {"match": cc.match, "generic_level": cc.generic_level,
                                   "only_closed_form": [repr(x) for x in cc.only_closed_form],
                                   "only_generic": [repr(x) for x in cc.only_generic]}
        return json.dumps(data, indent=2)
    lines = [f"y^{inp.s} = {render_unipoly(inp.h, 'x')}   (m0 = {inp.m0}, d = {inp.d})"]
    for title, recs in (("edge points", rep.edge_points), ("horizontal points", rep.horizontal_points),
                        ("resolved points", rep.resolved_points)):
        lines.append(f"{title}:")
        for p in recs:
            lines.append(f"  path {p.path}  {render_unipoly(p.point_minpoly)}  degree {p.residue_degree}")
    for rr, d in zip(rep.resolved_roots, descents):
        lines.append(f"multiple root {render_unipoly(d.g, 'x')} (mult {d.m_r}): a_r = {render_coeff(rr.a_r)}, "
                     f"f| = {render_unipoly(rr.restriction)}, beta = {rr.beta}")
        lines.append(f"  descended chart: {render(d.generators[0])} ; {render(d.generators[1])}")
    lines.append(f"outer regular at level {rep.outer_regular_level}; "
                 f"{rep.total_points()} points over the closure")
    if cc is not None:
        lines.append(f"cross-check: {'match' if cc.match else 'MISMATCH'}")
        for x in cc.only_closed_form:
            lines.append(f"  closed form only: {x}")
        for x in cc.only_generic:
            lines.append(f"  generic only: {x}")
    return "\n".join(lines)


def cmd_export(job):
    forest = _resolve(job)
    fmt = "dot" if job.format == "dot" else "json"
    out = export(forest, fmt, job.assert_connected).decode()
    if not forest.terminated:
        raise JobError(out.rstrip("\n"), EXIT_GUARD)
    return out


HANDLERS = {
    "polygon": cmd_polygon,
    "check": cmd_check,
    "resolve": cmd_resolve,
    "points": cmd_points,
    "genus": cmd_genus,
    "superelliptic": cmd_superelliptic,
    "export": cmd_export,
}


def _emit(text, path):
    if not text.endswith("\n"):
        text += "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv):
    """Run one job; returns (exit code, output text, error text, output path)."""
    job = None
    try:
        job = parse_job(argv)
        return EXIT_OK, HANDLERS[job.command](job), "", job.out
    except JobError as exc:
        path = job.out if job is not None else None
        if exc.code == EXIT_GUARD:
            return exc.code, str(exc), "error: iteration guard exceeded", path
        return exc.code, "", f"error: {exc}", path


def main(argv=None):
    code, out, err, path = run(sys.argv[1:] if argv is None else argv)
    try:
        if out:
            _emit(out, path)
    except OSError as exc:
        err, code = f"error: cannot write output: {exc}", EXIT_IO
    if err:
        sys.stderr.write(err + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
