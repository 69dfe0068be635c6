"""Command-line front end.

Modules come from a JSON input file (``-i``) or from the built-in names
``S``, ``k``, ``O<d>`` / ``O-<d>`` / ``Om<d>`` over k[x0..xn] (``n=``).
Parameters are given as ``key=value`` words, ranges as ``lo..hi``.

Exit codes: 0 success, 1 input error, 2 colimit not stabilized,
3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .abcat import CategoryError, GradedMorphism, Presentation, cyclic_module, free_module, from_matrix, hom_group_basis
from .homres import ExtGroup, ext_module, free_resolution, regularity
from .ring import PolyRing, RingError, field_from_spec, format_poly, vec_component
from .serre import (
    NotStabilized,
    SerreContext,
    ext_quotient,
    hom_quotient,
    hom_quotient_colimit,
    saturate,
    sheaf_cohomology_table,
    twist_rep,
)
from . import yoneda as Y

EXIT_OK, EXIT_INPUT, EXIT_NOT_STABILIZED, EXIT_INVARIANT = 0, 1, 2, 3

YONEDA_ACTIONS = ("compose", "pullback", "pushout", "class", "preimage-ext1", "exact-subcomplex")


class InputError(Exception):
    pass


class InvariantFailure(Exception):
    pass


# ------------------------------------------------------------------ input


@dataclass
class Workspace:
    ring: PolyRing
    modules: Dict[str, Presentation] = field(default_factory=dict)
    morphisms: Dict[str, GradedMorphism] = field(default_factory=dict)
    extensions: Dict[str, Y.ExtensionComplex] = field(default_factory=dict)
    ring_relations: tuple = ()


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: JSON syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be an object")
    return doc


def _rows(ring: PolyRing, rows, width: int, what: str) -> list:
    if not isinstance(rows, list):
        raise InputError(f"{what}: expected a list of rows")
    out = []
    for j, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != width:
            raise InputError(f"{what}: row {j} must have {width} entries")
        try:
            out.append([ring.poly(e if isinstance(e, str) else str(e)) for e in row])
        except RingError as exc:
            raise InputError(f"{what}: row {j}: {exc}") from None
    return out


def parse_document(doc: dict, field_override=None, where: str = "input") -> Workspace:
    """Validate an input document and build its presentations, morphisms and extensions."""
    allowed = {"field", "variables", "modules", "ring_relations", "morphisms", "extensions"}
    unknown = set(doc) - allowed
    if unknown:
        raise InputError(f"{where}: unknown keys {sorted(unknown)}")
    try:
        fld = field_from_spec(field_override if field_override is not None else doc.get("field"))
        variables = doc.get("variables")
        if not isinstance(variables, list) or not variables:
            raise InputError(f"{where}: 'variables' must be a non-empty list")
        ring = PolyRing(len(variables), fld, variables)
    except RingError as exc:
        raise InputError(f"{where}: {exc}") from None
    try:
        ring_rel = tuple(ring.poly(f).as_dict() for f in doc.get("ring_relations", []))
    except RingError as exc:
        raise InputError(f"{where}: ring_relations: {exc}") from None
    for i, f in enumerate(ring_rel):
        if not ring.poly(f).homogeneous:
            raise InputError(f"{where}: ring relation {i} is not homogeneous")
    ws = Workspace(ring, ring_relations=ring_rel)
    modules = doc.get("modules", {})
    if not isinstance(modules, dict):
        raise InputError(f"{where}: 'modules' must be an object")
    for name, spec in modules.items():
        if not isinstance(spec, dict) or "twists" not in spec:
            raise InputError(f"module {name}: needs 'twists'")
        twists = spec["twists"]
        if not isinstance(twists, list) or not all(isinstance(a, int) and a >= 0 for a in twists):
            raise InputError(f"module {name}: twists must be a list of non-negative integers")
        rows = _rows(ring, spec.get("relations", []), len(twists), f"module {name}")
        try:
            ws.modules[name] = from_matrix(ring, twists, rows, ring_rel)
        except (CategoryError, RingError) as exc:
            raise InputError(f"module {name}: {exc}") from None
    for name, spec in doc.get("morphisms", {}).items():
        try:
            src = resolve_module(ws, spec["source"])
            tgt = resolve_module(ws, spec["target"])
        except (KeyError, TypeError):
            raise InputError(f"morphism {name}: needs 'source' and 'target'") from None
        rows = _rows(ring, spec.get("images", []), tgt.rank, f"morphism {name}")
        if len(rows) != src.rank:
            raise InputError(f"morphism {name}: needs one image row per source generator ({src.rank})")
        images = []
        for row in rows:
            v = {}
            for i, f in enumerate(row):
                for m, c in f.as_dict().items():
                    v[(i, m)] = c
            images.append(v)
        try:
            ws.morphisms[name] = GradedMorphism(src, tgt, images, check=True)
        except (CategoryError, RingError) as exc:
            raise InputError(f"morphism {name}: {exc}") from None
    for name, seq in doc.get("extensions", {}).items():
        if not isinstance(seq, list) or not all(isinstance(s, str) for s in seq):
            raise InputError(f"extension {name}: expected a list of morphism names")
        missing = [s for s in seq if s not in ws.morphisms]
        if missing:
            raise InputError(f"extension {name}: unknown morphisms {missing}")
        try:
            ws.extensions[name] = Y.ExtensionComplex([ws.morphisms[s] for s in seq])
        except CategoryError as exc:
            raise InputError(f"extension {name}: {exc}") from None
    return ws


def parse_input(path: str, field_override=None) -> Workspace:
    return parse_document(_load_json(path), field_override, where=path)


_TWIST = re.compile(r"O(?:m(\d+)|(-?\d+))$")


def resolve_module(ws: Workspace, name: str) -> Presentation:
    if name in ws.modules:
        return ws.modules[name]
    ring = ws.ring
    if name == "S":
        return free_module(ring, [0], ws.ring_relations)
    if name == "k":
        return cyclic_module(ring, ring.gens(), ring_relations=ws.ring_relations)
    m = _TWIST.match(name)
    if m:
        d = -int(m.group(1)) if m.group(1) is not None else int(m.group(2))
        if ws.ring_relations:
            raise InputError("twisted structure sheaves are only built in over a polynomial ring")
        return twist_rep(ring, d)
    raise InputError(f"unknown module {name!r}")


# ------------------------------------------------------------------ jobs


@dataclass
class JobSpec:
    op: str
    action: Optional[str] = None
    inputs: List[str] = field(default_factory=list)
    params: Dict[str, str] = field(default_factory=dict)
    c: Optional[int] = None
    window: int = 3
    max_degree: Optional[int] = None
    strict: bool = False
    field: Optional[str] = None
    fmt: str = "table"


def parse_range(text: str, what: str) -> List[int]:
    m = re.fullmatch(r"\s*(-?\d+)\s*(?:\.\.\s*(-?\d+)\s*)?", text)
    if not m:
        raise InputError(f"{what}: expected an integer or a range lo..hi, got {text!r}")
    lo = int(m.group(1))
    hi = int(m.group(2)) if m.group(2) is not None else lo
    if hi < lo:
        raise InputError(f"{what}: empty range {text!r}")
    return list(range(lo, hi + 1))


def _int_param(job: JobSpec, key: str, default=None) -> int:
    raw = job.params.get(key)
    if raw is None:
        if default is None:
            raise InputError(f"missing parameter {key}=")
        return default
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{key} must be an integer, got {raw!r}") from None


def _workspace(job: JobSpec) -> Workspace:
    ws = None
    for path in job.inputs:
        part = parse_input(path, job.field)
        if ws is None:
            ws = part
        else:
            if part.ring != ws.ring or part.ring_relations != ws.ring_relations:
                raise InputError(f"{path}: ring differs from the first input")
            for attr in ("modules", "morphisms", "extensions"):
                getattr(ws, attr).update(getattr(part, attr))
    if "n" in job.params:
        n = _int_param(job, "n")
        if n < 1:
            raise InputError("n must be >= 1")
        if ws is None:
            try:
                ws = Workspace(PolyRing(n + 1, field_from_spec(job.field)))
            except RingError as exc:
                raise InputError(str(exc)) from None
        elif ws.ring.nvars != n + 1:
            raise InputError(f"n={n} disagrees with the {ws.ring.nvars} variables of the input")
    if ws is None:
        raise InputError("give an input file (-i) or n= for the built-in modules")
    return ws


def _module(job: JobSpec, ws: Workspace, key: str) -> Presentation:
    if key not in job.params:
        raise InputError(f"missing parameter {key}=")
    return resolve_module(ws, job.params[key])


def _extension(job: JobSpec, ws: Workspace, key: str) -> Y.ExtensionComplex:
    name = job.params.get(key)
    if name is None:
        raise InputError(f"missing parameter {key}=")
    if name not in ws.extensions:
        raise InputError(f"unknown extension {name!r}")
    return ws.extensions[name]


def _morphism(job: JobSpec, ws: Workspace, key: str) -> GradedMorphism:
    name = job.params.get(key)
    if name is None or name not in ws.morphisms:
        raise InputError(f"missing or unknown morphism {key}={name}")
    return ws.morphisms[name]


def _context(job: JobSpec) -> SerreContext:
    try:
        return SerreContext(window=job.window, max_degree=job.max_degree, strict=job.strict)
    except CategoryError as exc:
        raise InputError(str(exc)) from None


def _scalar(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    return int(x)


def _vector_row(v, P: Presentation) -> List[str]:
    return [format_poly(vec_component(v, i), P.ring) for i in range(P.rank)]


def _morphism_json(f: GradedMorphism) -> List[List[str]]:
    return [_vector_row(v, f.target) for v in f.images]


def _extension_json(e: Y.ExtensionComplex) -> dict:
    return {
        "c": e.c,
        "objects": [o.to_json() for o in e.objects],
        "maps": [_morphism_json(f) for f in e.maps],
        "exact": e.exact_flags,
    }


def _class_json(cls: Y.CocycleClass) -> dict:
    return {"c": cls.c, "coords": [_scalar(x) for x in cls.coords]}


def _policy(ctx: SerreContext) -> dict:
    return {"policy": "strict" if ctx.strict else "window", "window": ctx.window, "max_degree": ctx.max_degree}


def _op_gb(job, ws):
    M = _module(job, ws, "M")
    return {"module": job.params["M"], "gb": [_vector_row(v, M) for v in M.gb.gb]}


def _op_res(job, ws):
    M = _module(job, ws, "M")
    length = _int_param(job, "length", ws.ring.nvars + 1)
    if length < 1:
        raise InputError("length must be >= 1")
    R = free_resolution(M, length)
    if not R.d_squared_zero():
        raise InvariantFailure("resolution differentials do not compose to zero")
    betti = sorted([i, deg, n] for (i, deg), n in R.betti().items())
    return {"betti": betti, "betti_numbers": R.betti_numbers(), "complete": R.complete, "minimal": R.minimal}


def _op_regularity(job, ws):
    M = _module(job, ws, "M")
    if ws.ring_relations:
        raise InputError("regularity is only computed over a polynomial ring")
    return {"regularity": regularity(M)}


def _op_hilbert(job, ws):
    M = _module(job, ws, "M")
    degs = parse_range(job.params.get("d", "0..10"), "d")
    return {"degrees": [degs[0], degs[-1]], "hilbert": [M.hilbert(t) for t in degs]}


def _op_hom(job, ws):
    M, N = _module(job, ws, "M"), _module(job, ws, "N")
    return {"dim": len(hom_group_basis(M, N))}


def _op_ext(job, ws):
    c = _require_c(job)
    M, N = _module(job, ws, "M"), _module(job, ws, "N")
    R = free_resolution(M, c + 1)
    out = {"c": c, "dim": ExtGroup(c, R, N).dim}
    if "t" in job.params:
        ts = parse_range(job.params["t"], "t")
        E = ext_module(c, M, N, R)
        out["graded"] = [[t, E.hilbert(t)] for t in ts]
    return out


def _op_saturate(job, ws):
    M = _module(job, ws, "M")
    ctx = _context(job)
    sat = saturate(M, ctx)
    if not sat.eta.is_well_defined():
        raise InvariantFailure("saturation unit is not a morphism")
    return {
        "saturation": sat.module.to_json(),
        "eta": _morphism_json(sat.eta),
        "torsion": sat.torsion.to_json(),
        "steps": sat.steps,
    }


def _op_hom_quotient(job, ws):
    M, N = _module(job, ws, "M"), _module(job, ws, "N")
    ctx = _context(job)
    route = job.params.get("route", "saturation")
    if route not in ("saturation", "colimit", "both"):
        raise InputError("route must be saturation, colimit or both")
    out = {"route": route}
    if route in ("saturation", "both"):
        out["dim"] = hom_quotient(M, N, ctx)[0]
    if route in ("colimit", "both"):
        out["colimit_dim"] = hom_quotient_colimit(M, N, ctx)
        out.update(_policy(ctx))
    if route == "colimit":
        out["dim"] = out["colimit_dim"]
    if route == "both" and out["dim"] != out["colimit_dim"]:
        raise InvariantFailure("Hom routes disagree")
    return out


def _op_ext_quotient(job, ws):
    c = _require_c(job)
    M, N = _module(job, ws, "M"), _module(job, ws, "N")
    ctx = _context(job)
    res = ext_quotient(c, M, N, ctx)
    out = res.to_json()
    out.update(_policy(ctx))
    out.update({"strict": ctx.strict, "start_degree": res.start_degree, "trace": [list(t) for t in res.trace]})
    return out


def _op_sheaf(job, ws):
    n = _int_param(job, "n")
    if n < 1:
        raise InputError("n must be >= 1")
    ds = parse_range(job.params.get("d", "-5..5"), "d")
    cs = parse_range(job.params.get("c", f"0..{n}"), "c")
    if cs[0] < 0:
        raise InputError("c must be >= 0")
    ctx = _context(job)
    try:
        fld = field_from_spec(job.field)
    except RingError as exc:
        raise InputError(str(exc)) from None
    table = sheaf_cohomology_table(ds, cs, n, ctx, fld)
    out = {"n": n, "d_range": [ds[0], ds[-1]], "c_range": [cs[0], cs[-1]],
           "table": [[d] + [table[d][c] for c in cs] for d in ds]}
    out.update(_policy(ctx))
    return out


def _require_c(job: JobSpec) -> int:
    if job.c is None:
        raise InputError("missing -c")
    if job.c < 0:
        raise InputError("c must be >= 0")
    return job.c


def _op_yoneda(job, ws):
    act = job.action
    if act == "class":
        e = _extension(job, ws, "E")
        if not e.is_exact():
            raise InputError(f"extension is not exact (flags {e.exact_flags})")
        return {"extension": job.params["E"], "class": _class_json(Y.cocycle_class(e)), "exact": e.exact_flags}
    if act == "compose":
        e = Y.yoneda_compose(_extension(job, ws, "E1"), _extension(job, ws, "E2"))
    elif act == "pullback":
        e = Y.pullback_ext(_morphism(job, ws, "phi"), _extension(job, ws, "E"))
    elif act == "pushout":
        e = Y.pushout_ext(_extension(job, ws, "E"), _morphism(job, ws, "psi"))
    elif act == "preimage-ext1":
        e_hat = _extension(job, ws, "E")
        pre, inc = Y.qext_preimage_ext1(e_hat)
        ctx = _context(job)
        cls = Y.qext_image(pre, inc, ctx)
        return {"preimage": _extension_json(pre), "inclusion": _morphism_json(inc),
                "class": _class_json(cls), "stabilized_at": cls.slot, **_policy(ctx)}
    elif act == "exact-subcomplex":
        e = _extension(job, ws, "E")
        ctx = _context(job)
        mode = job.params.get("mode", "subcomplex")
        builders = {"subcomplex": Y.exact_subcomplex, "almost-complement": Y.exact_almost_complement,
                    "ses": Y.ses_replace}
        if mode not in builders:
            raise InputError(f"mode must be one of {sorted(builders)}")
        sub = builders[mode](e, ctx)
        checks = {"exact": sub.ext.is_exact(), "quotients_in_C": sub.quotients_in_C(),
                  "commutes": sub.inclusions_commute(e)}
        if not all(checks.values()):
            raise InvariantFailure(f"subcomplex checks failed: {checks}")
        return {"mode": mode, "extension": _extension_json(sub.ext),
                "inclusions": [_morphism_json(f) for f in sub.inclusions], "checks": checks}
    else:
        raise InputError(f"unknown yoneda action {act!r}")
    out = {"extension": _extension_json(e)}
    if e.is_exact():
        out["class"] = _class_json(Y.cocycle_class(e))
    return out


OPERATIONS = {
    "gb": _op_gb,
    "res": _op_res,
    "regularity": _op_regularity,
    "hilbert": _op_hilbert,
    "hom": _op_hom,
    "ext": _op_ext,
    "saturate": _op_saturate,
    "hom-quotient": _op_hom_quotient,
    "ext-quotient": _op_ext_quotient,
    "sheaf-cohomology": _op_sheaf,
    "yoneda": _op_yoneda,
}


def run(job: JobSpec) -> Tuple[int, dict]:
    """Execute a job; returns (exit code, output document)."""
    head = {"op": job.op if job.action is None else f"{job.op} {job.action}"}
    try:
        if job.op not in OPERATIONS:
            raise InputError(f"unknown operation {job.op!r}")
        ws = None if job.op == "sheaf-cohomology" else _workspace(job)
        doc = OPERATIONS[job.op](job, ws)
    except InputError as exc:
        return EXIT_INPUT, {**head, "status": "error", "error": str(exc)}
    except NotStabilized as exc:
        return EXIT_NOT_STABILIZED, {**head, "status": "not_stabilized", "error": str(exc),
                                     "trace": [list(t) for t in exc.trace]}
    except (CategoryError, RingError) as exc:
        return EXIT_INPUT, {**head, "status": "error", "error": str(exc)}
    except InvariantFailure as exc:
        return EXIT_INVARIANT, {**head, "status": "invariant_failure", "error": str(exc)}
    except Exception as exc:  # never silent: anything unexpected is an invariant failure
        return EXIT_INVARIANT, {**head, "status": "invariant_failure", "error": f"{type(exc).__name__}: {exc}"}
    return EXIT_OK, {**head, "status": "ok", **doc}


# ------------------------------------------------------------------ output


def emit(doc: dict, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return render_table(doc)


def _grid(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [list(map(str, header))] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[j]) for r in cells) for j in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)


def betti_grid(betti: Sequence[Sequence[int]]) -> str:
    """Rows are internal degree minus homological index, columns homological index."""
    if not betti:
        return "(zero module)"
    cols = range(0, max(i for i, _, _ in betti) + 1)
    shifts = sorted({d - i for i, d, _ in betti})
    vals = {(i, d - i): n for i, d, n in betti}
    rows = [[f"{s}:"] + [vals.get((i, s), "-") for i in cols] for s in shifts]
    return _grid([""] + [str(i) for i in cols], rows)


def render_table(doc: dict) -> str:
    lines = []
    if "betti" in doc:
        lines.append(betti_grid(doc["betti"]))
    if "table" in doc:
        cs = range(doc["c_range"][0], doc["c_range"][1] + 1)
        lines.append(_grid(["d"] + [f"h^{c}" for c in cs], doc["table"]))
    for key in sorted(doc):
        if key in ("betti", "table"):
            continue
        lines.append(f"{key}: {json.dumps(doc[key], sort_keys=True)}")
    return "\n".join(lines)


# ------------------------------------------------------------------ argument parsing


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("params", nargs="*", help="key=value parameters (M=, N=, n=, d=lo..hi, ...)")
    p.add_argument("-i", "--input", action="append", default=[], help="JSON input file (repeatable)")
    p.add_argument("-c", type=int, default=None, help="cohomological degree")
    p.add_argument("--window", type=int, default=3, help="equal consecutive values required (default 3)")
    p.add_argument("--max-degree", type=int, default=None, help="truncation degree cap (default SQEXT_MAX_DEGREE or 30)")
    p.add_argument("--strict", action="store_true", help="also verify connecting maps are isomorphisms")
    p.add_argument("--field", default=None, help="fp:<p> or qq (overrides the input file)")
    p.add_argument("--json", action="store_true", help="canonical JSON output")


def build_parser() -> argparse.ArgumentParser:
    """Top-level parser: the operation name followed by its own arguments."""
    parser = argparse.ArgumentParser(prog="sqext", description="Graded modules, Ext and the quotient by finite-length modules.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("op", choices=list(OPERATIONS))
    parser.add_argument("rest", nargs=argparse.REMAINDER)
    return parser


def operation_parser(op: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=f"sqext {op}")
    if op == "yoneda":
        p.add_argument("action", choices=YONEDA_ACTIONS)
    _common(p)
    return p


def job_from_args(args: argparse.Namespace) -> JobSpec:
    params = {}
    for word in args.params:
        if "=" not in word:
            raise InputError(f"parameters must look like key=value, got {word!r}")
        k, v = word.split("=", 1)
        if k in params:
            raise InputError(f"parameter {k} given twice")
        params[k] = v
    return JobSpec(
        op=args.op,
        action=getattr(args, "action", None),
        inputs=list(args.input),
        params=params,
        c=args.c,
        window=args.window,
        max_degree=args.max_degree,
        strict=args.strict,
        field=args.field,
        fmt="json" if args.json else "table",
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        top = parser.parse_args(argv)
        args = operation_parser(top.op).parse_intermixed_args(top.rest)
        args.op = top.op
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    fmt = "json" if args.json else "table"
    try:
        job = job_from_args(args)
    except InputError as exc:
        code, doc = EXIT_INPUT, {"op": args.op, "status": "error", "error": str(exc)}
    else:
        code, doc = run(job)
    print(emit(doc, fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())
