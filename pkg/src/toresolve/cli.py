"""Command-line front end: cone ingestion, reports, traces, SVG rendering.

Input files are JSON documents ``{"lattice_rank": r, "cones": [{"generators":
[[...], ...]}, ...]}`` with integer entries only; rationals in reports are
emitted as ``{"num": ..., "den": ...}`` objects.  Exit status 2 flags a parse
problem, 1 a domain error from the core (the message names the offending
cone), 0 success.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .classify import classify
from .cones import Cone, make_cone
from .hilbert import embedding_dimension, hilbert_basis, toric_relations
from .lattice import Covector, LatticeVector
from .resolve2d import minimal_resolution
from .resolve3d import (
    PolygonComplex,
    _curve_phase,
    _fixed_point_phase,
    canonical_modification,
    completions,
    polygon_form,
    resolve,
)


class ParseError(ValueError):
    pass


def parse_job(text: str) -> dict:
    """Validated job document; unknown fields are rejected."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    unknown = set(data) - {"lattice_rank", "cones"}
    if unknown:
        raise ParseError(f"unknown fields: {sorted(unknown)}")
    rank = data.get("lattice_rank")
    if not isinstance(rank, int) or rank < 1:
        raise ParseError("lattice_rank must be a positive integer")
    cones = data.get("cones")
    if not isinstance(cones, list) or not cones:
        raise ParseError("cones must be a non-empty list")
    for entry in cones:
        if not isinstance(entry, dict) or set(entry) != {"generators"}:
            raise ParseError("each cone must be an object with exactly a 'generators' field")
        gens = entry["generators"]
        if not isinstance(gens, list) or not gens:
            raise ParseError("generators must be a non-empty list")
        for g in gens:
            if (
                not isinstance(g, list)
                or len(g) != rank
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in g)
            ):
                raise ParseError(f"generator {g} must be a list of {rank} integers")
    return {"lattice_rank": rank, "cones": [{"generators": [list(g) for g in e["generators"]]} for e in cones]}


def serialize(obj) -> str:
    """Canonical JSON serialization (stable across runs and platforms)."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _cones_of(job: dict) -> list[Cone]:
    return [
        make_cone([LatticeVector(tuple(g)) for g in entry["generators"]])
        for entry in job["cones"]
    ]


def _frac(x) -> dict:
    f = Fraction(x)
    return {"num": f.numerator, "den": f.denominator}


def _covector(m: Covector) -> list[dict]:
    return [_frac(c) for c in m.coords]


def _report_json(c: Cone) -> dict:
    r = classify(c)
    return {
        "generators": [list(g.coords) for g in c.generators],
        "smooth": r.smooth,
        "q_factorial": r.q_factorial,
        "q_gorenstein": (
            None
            if r.q_gorenstein is None
            else {"m_sigma": _covector(r.q_gorenstein[0]), "index": r.q_gorenstein[1]}
        ),
        "gorenstein": r.gorenstein,
        "terminal": r.terminal,
        "canonical": r.canonical,
        "log_terminal": r.log_terminal,
        "lci": r.lci,
        "rational": r.rational,
        "embedding_dimension": r.embedding_dim,
    }


def _cmd_classify(cones, args) -> dict:
    return {"reports": [_report_json(c) for c in cones]}


def _cmd_hilbert(cones, args) -> dict:
    results = []
    for c in cones:
        entry = {
            "generators": [list(g.coords) for g in c.generators],
            "hilbert_basis": [list(m.coords) for m in hilbert_basis(c).members],
        }
        if c.is_full_dimensional:
            entry["embedding_dimension"] = embedding_dimension(c)
            if args.degree_bound:
                entry["relations"] = [
                    {"left": list(r.left), "right": list(r.right)}
                    for r in toric_relations(c, args.degree_bound)
                ]
        else:
            entry["embedding_dimension"] = None
        results.append(entry)
    return {"results": results}


def _cmd_resolve2d(cones, args) -> dict:
    results = []
    for c in cones:
        fan, exceptional = minimal_resolution(c)
        results.append(
            {
                "generators": [list(g.coords) for g in c.generators],
                "rays": [list(r.coords) for r in fan.rays()],
                "maximal_cones": [
                    [list(g.coords) for g in mc.generators] for mc in fan.maximal_cones
                ],
                "exceptional": [
                    {"ray": list(u.coords), "self_intersection": b}
                    for u, b in exceptional
                ],
            }
        )
    return {"results": results}


def _trace_json(trace) -> list[dict]:
    steps = []
    for s in trace.steps:
        steps.append(
            {
                "phase": s.phase,
                "piece": s.piece,
                "centers": [list(map(list, cell.vertices)) for cell in s.centers],
                "new_rays": [list(r.coords) for r in s.new_rays],
                "discrepancies": (
                    None
                    if s.discrepancy is None
                    else [
                        {"ray": list(v.coords), "a": _frac(a)}
                        for v, a in s.discrepancy.entries
                    ]
                ),
                "census_after": s.census_after,
            }
        )
    return steps


def _cmd_resolve3d(cones, args) -> dict:
    results = []
    for c in cones:
        fan, trace = resolve(c)
        entry = {
            "generators": [list(g.coords) for g in c.generators],
            "final_rays": [list(r.coords) for r in fan.rays()],
            "maximal_cones": [
                [list(g.coords) for g in mc.generators] for mc in fan.maximal_cones
            ],
            "trace": _trace_json(trace),
            "covers": [
                {
                    "piece": i,
                    "index": cert.index,
                    "sublattice_basis_columns": [
                        [cert.sublattice_basis.rows[r][j] for r in range(cert.sublattice_basis.nrows)]
                        for j in range(cert.sublattice_basis.ncols)
                    ],
                }
                for i, cert in trace.covers
            ],
        }
        if args.completion is not None:
            entry["completions"] = _completions_json(c, args.completion)
        results.append(entry)
    return {"results": results}


def _pipeline_complex(c: Cone):
    """Phase-(iv) state of the single Gorenstein piece of a cone (for rendering)."""
    can = canonical_modification(c)
    if len(can.maximal_cones) != 1:
        raise ValueError(
            "rendering and completion listing support canonical Gorenstein cones "
            f"(got {len(can.maximal_cones)} canonical pieces)"
        )
    piece = can.maximal_cones[0]
    polygon, basis = polygon_form(piece)
    pc = PolygonComplex.initial(polygon)
    pc, _ = _fixed_point_phase(pc)
    pc, _ = _curve_phase(pc)
    return pc


def _completions_json(c: Cone, which: str) -> list[dict]:
    pc = _pipeline_complex(c)
    comps = completions(pc)
    if which != "all":
        idx = int(which)
        comps = [comps[idx]]
    out = []
    for fan, psi in comps:
        out.append(
            {
                "rays": [list(r.coords) for r in fan.rays()],
                "maximal_cones": [
                    [list(g.coords) for g in mc.generators] for mc in fan.maximal_cones
                ],
                "height_certificate": {
                    str(list(r)): v for r, v in sorted(psi.ray_values.items())
                },
            }
        )
    return out


# ---------------------------------------------------------------------------
# SVG rendering of a polygon complex
# ---------------------------------------------------------------------------


def render_svg(pc: PolygonComplex, scale: int = 40) -> str:
    """Draw the height-one polygon complex: lattice dots, cells, shaded
    ordinary double points with their box diagonals dashed."""
    pts = pc.polygon.lattice_points()
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    pad = 1
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad
    w = (x1 - x0) * scale
    h = (y1 - y0) * scale

    def xy(p):
        return ((p[0] - x0) * scale, (y1 - p[1]) * scale)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
    ]
    for cell, tag in zip(pc.cells, pc.tags()):
        path = " ".join(f"{x},{y}" for x, y in map(xy, cell.vertices))
        fill = "#ffe08a" if tag["unit_parallelogram"] else "none"
        parts.append(
            f'<polygon points="{path}" fill="{fill}" stroke="#555" stroke-width="1"/>'
        )
        if tag["unit_parallelogram"]:
            a, _, c2, _ = cell.vertices
            (xa, ya), (xc, yc) = xy(a), xy(c2)
            parts.append(
                f'<line x1="{xa}" y1="{ya}" x2="{xc}" y2="{yc}" '
                'stroke="#aa4400" stroke-width="1" stroke-dasharray="4 3"/>'
            )
    boundary = " ".join(f"{x},{y}" for x, y in map(xy, pc.polygon.vertices))
    parts.append(
        f'<polygon points="{boundary}" fill="none" stroke="black" stroke-width="2"/>'
    )
    vertex_set = {p for c in pc.cells for p in c.vertices}
    for p in pts:
        x, y = xy(p)
        r = 3 if p in vertex_set else 2
        color = "#cc0000" if p in vertex_set else "#666"
        parts.append(f'<circle cx="{x}" cy="{y}" r="{r}" fill="{color}"/>')
        parts.append(
            f'<text x="{x + 4}" y="{y - 4}" font-size="9" fill="#333">'
            f"{p[0]},{p[1]}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _cmd_render(cones, args) -> str:
    if len(cones) != 1:
        raise ValueError("render expects exactly one cone in the input file")
    pc = _pipeline_complex(cones[0])
    return render_svg(pc, scale=args.scale)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="toresolve",
        description="classify and resolve 2- and 3-dimensional toric singularities",
    )
    parser.add_argument(
        "command",
        choices=["classify", "hilbert", "resolve2d", "resolve3d", "render"],
    )
    parser.add_argument("--in", dest="infile", required=True, help="input JSON file")
    parser.add_argument("--out", dest="outfile", required=True, help="output file")
    parser.add_argument("--svg", dest="svgfile", help="also write an SVG rendering")
    parser.add_argument(
        "--completion",
        default=None,
        help="completion selection for resolve3d: an index or 'all'",
    )
    parser.add_argument("--degree-bound", dest="degree_bound", type=int, default=0)
    parser.add_argument("--scale", type=int, default=40, help="SVG pixels per lattice unit")
    args = parser.parse_args(argv)

    try:
        with open(args.infile, "r", encoding="utf-8") as fh:
            job = parse_job(fh.read())
    except (OSError, ParseError) as e:
        print(f"toresolve: parse failure: {e}", file=sys.stderr)
        return 2

    try:
        cones = _cones_of(job)
        if args.command == "render":
            payload = _cmd_render(cones, args)
            with open(args.outfile, "w", encoding="utf-8") as fh:
                fh.write(payload)
        else:
            handler = {
                "classify": _cmd_classify,
                "hilbert": _cmd_hilbert,
                "resolve2d": _cmd_resolve2d,
                "resolve3d": _cmd_resolve3d,
            }[args.command]
            result = handler(cones, args)
            with open(args.outfile, "w", encoding="utf-8") as fh:
                fh.write(serialize(result))
            if args.svgfile:
                if len(cones) != 1:
                    raise ValueError("--svg expects exactly one cone in the input file")
                with open(args.svgfile, "w", encoding="utf-8") as fh:
                    fh.write(render_svg(_pipeline_complex(cones[0]), scale=args.scale))
    except ValueError as e:
        print(f"toresolve: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
