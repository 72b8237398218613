"""Command-line frontend: input files, commands and report rendering.

Input files consist of bracketed sections holding integer rows or
``key = value`` lines; ``#`` starts a comment::

    [arrangement]        # rows of A
    1 0 0 1 1
    0 1 0 1 0
    0 0 1 0 1

    [exponents]
    n = 2 1 1 1 1        # block sizes
    l = 1 1 2 2 2 2      # exponents, flattened over the blocks
    m = 1                # number of free variables S_k

    [P]                  # the d rows of P (P0 is implied)
    -2 -3 1 1 1 1 1

    [fan]                # maximal cones as 0-based variable indices ...
    1 2 3 4 5
    # ... or an ample class in the free part of K:  ample = [3, 4]

    [factors]            # optional: column groups of an arrangement product
    [task]               # optional: command = singtype

Variables are numbered T_01..T_0n_0, T_11, ..., S_1..S_m from 0; every
report starts with that mapping.
"""

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from .anticanon import anticanonical_complex, check_vertex_consistency, gorenstein_check, singularity_type
from .arrangement import ArrangementData, decompose, flats, is_indecomposable, position_type
from .classifier import (SearchConfig, dedupe, normal_form_key, product_family,
                         reference_rings, run_search)
from .coxdata import (CoxRingData, ExponentData, is_honestly_special, k_prime_variables,
                      relation_degree)
from .tropical import classify_cones, elementary_cones, refinement_rays, tropical_data
from .varietycore import (VarietyData, anticanonical_class, bits, divisor_class_cones,
                          is_fano, smoothness_report)

COMMANDS = ("ring", "variety", "trop", "acomplex", "singtype", "fano",
            "classify", "product", "decompose")
FILE_COMMANDS = ("ring", "variety", "trop", "acomplex", "singtype", "fano", "decompose")
SECTIONS = ("arrangement", "exponents", "P", "fan", "factors", "task")


class InputError(ValueError):
    def __init__(self, line, message):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass
class InputSpec:
    A: list
    l: tuple
    m: int
    d_rows: list
    cones: list = None      # maximal cones, or None when `ample` is set
    ample: tuple = None
    factors: list = None
    task: str = None

    @property
    def n(self):
        return tuple(len(li) for li in self.l)

    def exponents(self):
        return ExponentData(self.l, self.m)

    def ring(self):
        return CoxRingData(ArrangementData(self.A), self.exponents(), self.d_rows or None,
                           factors=self.factors)

    def variety(self, ring=None):
        ring = ring or self.ring()
        if self.cones is not None:
            return VarietyData(ring, self.cones)
        if self.ample is not None:
            return VarietyData(ring, ample=self.ample)
        raise ValueError("input has no [fan] section")


# -- parsing ----------------------------------------------------------------------

def _tokens(text):
    return text.replace(",", " ").replace("[", " ").replace("]", " ").split()


def _ints(text, lineno):
    out = []
    for tok in _tokens(text):
        try:
            out.append(int(tok))
        except ValueError:
            raise InputError(lineno, f"non-integer token {tok!r}") from None
    return out


def _rationals(text, lineno):
    out = []
    for tok in _tokens(text):
        try:
            q = Fraction(tok)
        except ValueError:
            raise InputError(lineno, f"non-rational token {tok!r}") from None
        out.append(q)
    return out


def _read_sections(text):
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]") and "=" not in line:
            name = line[1:-1].strip()
            if name not in SECTIONS:
                raise InputError(lineno, f"unknown section [{name}]")
            if name in sections:
                raise InputError(lineno, f"section [{name}] given twice")
            sections[name] = []
            current = name
            continue
        if current is None:
            raise InputError(lineno, "content before the first section")
        sections[current].append((lineno, line))
    return sections


def _keyed(entries, allowed):
    out = {}
    for lineno, line in entries:
        if "=" not in line:
            raise InputError(lineno, f"expected one of {', '.join(allowed)} = ...")
        key, value = (x.strip() for x in line.split("=", 1))
        if key not in allowed:
            raise InputError(lineno, f"unknown key {key!r}")
        out[key] = (lineno, value)
    return out


def parse_input(text):
    sections = _read_sections(text)
    for name in ("arrangement", "exponents"):
        if name not in sections:
            raise InputError(None, f"missing section [{name}]")

    A = []
    for lineno, line in sections["arrangement"]:
        row = _ints(line, lineno)
        if A and len(row) != len(A[0]):
            raise InputError(lineno, f"row has {len(row)} entries, expected {len(A[0])}")
        A.append(row)
    if not A:
        raise InputError(None, "empty [arrangement]")
    ncols = len(A[0])

    ex = _keyed(sections["exponents"], ("n", "l", "m"))
    if "n" not in ex:
        raise InputError(None, "[exponents] needs n")
    lineno, value = ex["n"]
    n = _ints(value, lineno)
    if len(n) != ncols:
        raise InputError(lineno, f"n has {len(n)} blocks, A has {ncols} columns")
    if any(x < 1 for x in n):
        raise InputError(lineno, "block sizes must be positive")
    if "l" in ex:
        lineno, value = ex["l"]
        flat = _ints(value, lineno)
        if len(flat) != sum(n):
            raise InputError(lineno, f"l has {len(flat)} entries, n asks for {sum(n)}")
        if any(x < 1 for x in flat):
            raise InputError(lineno, "exponents must be positive")
    else:
        flat = [1] * sum(n)
    l, pos = [], 0
    for k in n:
        l.append(tuple(flat[pos:pos + k]))
        pos += k
    m = 0
    if "m" in ex:
        lineno, value = ex["m"]
        vals = _ints(value, lineno)
        if len(vals) != 1 or vals[0] < 0:
            raise InputError(lineno, "m must be one nonnegative integer")
        m = vals[0]
    N = sum(n) + m

    d_rows = []
    for lineno, line in sections.get("P", []):
        row = _ints(line, lineno)
        if len(row) != N:
            raise InputError(lineno, f"d row has {len(row)} entries, expected n+m = {N}")
        d_rows.append(row)

    factors = None
    if "factors" in sections:
        factors, seen = [], []
        for lineno, line in sections["factors"]:
            group = _ints(line, lineno)
            if any(not 0 <= j < ncols for j in group):
                raise InputError(lineno, f"factor column out of range 0..{ncols - 1}")
            factors.append(tuple(group))
            seen += group
        if sorted(seen) != list(range(ncols)):
            raise InputError(sections["factors"][-1][0], "factors must partition the columns")

    cones = ample = None
    if "fan" in sections:
        entries = sections["fan"]
        if any("=" in line for _, line in entries):
            if len(entries) != 1:
                raise InputError(entries[1][0], "ample class excludes explicit cones")
            lineno, value = _keyed(entries, ("ample",))["ample"]
            ample = tuple(_rationals(value, lineno))
        else:
            cones = []
            for lineno, line in entries:
                cone = _ints(line, lineno)
                if any(not 0 <= j < N for j in cone):
                    raise InputError(lineno, f"variable index out of range 0..{N - 1}")
                if len(set(cone)) != len(cone):
                    raise InputError(lineno, "repeated variable in cone")
                cones.append(sorted(cone))
            if not cones:
                raise InputError(None, "empty [fan]")

    task = None
    if "task" in sections:
        lineno, value = _keyed(sections["task"], ("command",))["command"]
        if value not in FILE_COMMANDS:
            raise InputError(lineno, f"unknown command {value!r}")
        task = value

    return InputSpec(A, tuple(l), m, d_rows, cones, ample, factors, task)


def _row(vals):
    return " ".join(str(x) for x in vals)


def serialize(spec):
    """Canonical text form; parse(serialize(s)) reproduces s."""
    out = ["[arrangement]"]
    out += [_row(r) for r in spec.A]
    out += ["", "[exponents]", f"n = {_row(spec.n)}",
            f"l = {_row(x for li in spec.l for x in li)}", f"m = {spec.m}"]
    if spec.d_rows:
        out += ["", "[P]"] + [_row(r) for r in spec.d_rows]
    if spec.cones is not None:
        out += ["", "[fan]"] + [_row(c) for c in spec.cones]
    elif spec.ample is not None:
        out += ["", "[fan]", f"ample = [{', '.join(fmt_q(x) for x in spec.ample)}]"]
    if spec.factors:
        out += ["", "[factors]"] + [_row(f) for f in spec.factors]
    if spec.task:
        out += ["", "[task]", f"command = {spec.task}"]
    return "\n".join(out) + "\n"


# -- formatting ---------------------------------------------------------------------

def fmt_q(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_vec(v):
    return "(" + ", ".join(fmt_q(x) for x in v) + ")"


def fmt_class(G, elem):
    """Element of K as (free coords, [a mod d] ...)."""
    parts = [fmt_q(x) for x in elem[:G.rank]]
    parts += [f"[{a} mod {t}]" for a, t in zip(elem[G.rank:], G.torsion)]
    return "(" + ", ".join(parts) + ")"


def fmt_group(G):
    parts = [f"Z^{G.rank}"] if G.rank else []
    counts = {}
    for t in G.torsion:
        counts[t] = counts.get(t, 0) + 1
    for t in sorted(counts):
        parts.append(f"(Z/{t})^{counts[t]}" if counts[t] > 1 else f"Z/{t}")
    return " + ".join(parts) or "0"


def _labels(ring):
    return ring.exponents.labels()


def _names(ring, idx):
    lab = _labels(ring)
    return "{" + ", ".join(lab[j] for j in sorted(idx)) + "}"


def _monomial_text(ring, i):
    e = ring.exponents
    lab = _labels(ring)
    parts = []
    for j, p in zip(e.block_vars(i), e.l[i]):
        parts.append(lab[j] if p == 1 else f"{lab[j]}^{p}")
    return "*".join(parts)


def relation_text(ring, k):
    out = ""
    for i, c in enumerate(ring.relations[k]):
        if not c:
            continue
        mono = _monomial_text(ring, i)
        coef = "" if abs(c) == 1 else f"{abs(c)}*"
        sign = "-" if c < 0 else "+"
        out += (f"{'-' if c < 0 else ''}{coef}{mono}" if not out else f" {sign} {coef}{mono}")
    return out + " = 0"


def header(ring):
    return [f"{j} = {name}" for j, name in enumerate(_labels(ring))]


# -- reports ---------------------------------------------------------------------------

def _verdict(x):
    return "undecided" if x is None else ("yes" if x else "no")


def report_ring(spec, opts):
    ring = spec.ring()
    G = ring.grading
    honest, why = is_honestly_special(ring)
    kp = k_prime_variables(ring)
    return {
        "summary": f"R(A,P): dim {ring.dim}, K = {fmt_group(G)}",
        "n": list(ring.exponents.n), "m": ring.exponents.m,
        "r": ring.r, "s": ring.s, "c": ring.c,
        "ring_dimension": ring.dim,
        "class_group": fmt_group(G),
        "degrees": [f"{lab}: {fmt_class(G, d)}" for lab, d in zip(_labels(ring), G.degrees())],
        "relations": [relation_text(ring, k) for k in range(len(ring.relations))],
        "relation_degrees": [fmt_class(G, d) for d in relation_degree(ring)],
        "anticanonical": fmt_class(G, anticanonical_class(ring)[0]),
        "honestly_special": honest, "honesty_reason": why,
        "k_prime": [f"{lab}: {_verdict(x)}"
                    for lab, x in zip(_labels(ring), kp)],
    }


def report_variety(spec, opts):
    ring = spec.ring()
    v = spec.variety(ring)
    G = ring.grading
    sm = smoothness_report(v)
    dc = divisor_class_cones(v)
    gor = gorenstein_check(v)
    try:
        fano = is_fano(v)
    except ValueError as exc:
        fano = f"undefined ({exc})"
    return {
        "summary": f"dim {v.dim}, Picard rank {v.rho}, {sm.status}",
        "dimension": v.dim, "complexity": ring.c, "picard_rank": v.rho,
        "class_group": fmt_group(G),
        "maximal_cones": [_names(ring, c) for c in v.maximal_cones],
        "x_faces": int(v.x_array.sum()),
        "minimal_x_faces": [_names(ring, bits(m)) for m in v.minimal_x_faces],
        "smoothness": sm.status,
        "smoothness_witness": _names(ring, sm.witness) if sm.witness else None,
        "effective_cone": [fmt_vec(r) for r in dc.eff.rays],
        "moving_cone": [fmt_vec(r) for r in dc.mov.rays],
        "semiample_cone": [fmt_vec(r) for r in dc.sample.rays],
        "anticanonical": fmt_class(G, anticanonical_class(v)[0]),
        "fano": fano,
        "gorenstein_index": gor.index,
    }


def report_fano(spec, opts):
    ring = spec.ring()
    v = spec.variety(ring)
    k, free = anticanonical_class(v)
    fano = is_fano(v)
    return {
        "summary": "Fano" if fano else "not Fano",
        "anticanonical": fmt_class(ring.grading, k),
        "anticanonical_free": fmt_vec(free),
        "semiample_cone": [fmt_vec(r) for r in divisor_class_cones(v).sample.rays],
        "fano": fano,
    }


def report_trop(spec, opts):
    ring = spec.ring()
    v = spec.variety(ring)
    co = opts.coarsen
    trop = tropical_data(v, co)
    types = classify_cones(v, coarsen=co)
    counts = {}
    for t in types.values():
        counts[t] = counts.get(t, 0) + 1
    elem = elementary_cones(v, co)
    return {
        "summary": f"{len(trop.base_cones)} maximal cones in trop, "
                   + ", ".join(f"{counts[k]} {k}" for k in sorted(counts)),
        "structure": "nested sets" if trop.coarse else "chains of flats",
        "lineality_dim": trop.s,
        "rays": [f"{_block_set(F)}: {fmt_vec(trop.ray_of[F])}"
                 for F in sorted(trop.ray_of, key=lambda F: (len(F), sorted(F)))],
        "maximal_cones": [" ".join(_block_set(F) for F in ch) for ch in
                          sorted(trop.base_cones, key=lambda ch: [sorted(F) for F in ch])],
        "cone_types": [f"{_names(ring, c)}: {types[c]}" for c in
                       sorted(types, key=lambda c: (-len(c), sorted(c)))],
        "elementary_cones": [{
            "cone": _names(ring, e.generators), "kind": e.kind,
            "weights": list(e.weights), "v": fmt_vec(e.v_sigma), "c": e.c_sigma,
            "ray": fmt_vec(e.ray)} for e in elem],
        "refinement_rays": [fmt_vec(r) for r in refinement_rays(v, co)],
    }


def _block_set(F):
    return "{" + ",".join(str(i) for i in sorted(F)) + "}"


def report_acomplex(spec, opts):
    ring = spec.ring()
    v = spec.variety(ring)
    ac = anticanonical_complex(v, opts.coarsen)
    rows = []
    for r in sorted(ac.rays):
        d = ac.rays[r]
        src = "column" if d.source == "original" else _names(ring, d.source.generators)
        rows.append({"ray": fmt_vec(r), "source": src, "discrepancy": fmt_q(d.discrepancy),
                     "vertex": fmt_vec(d.vertex) if d.vertex is not None else None})
    return {
        "summary": f"{len(ac.cells)} cells, " + ("bounded" if ac.bounded else "unbounded"),
        "bounded": ac.bounded,
        "rays": rows,
        "cells": [{"rays": [fmt_vec(r) for r in c.cone.rays], "u": fmt_vec(c.u)}
                  for c in ac.cells],
        "vertex_check_failures": len(check_vertex_consistency(ac)),
    }


def report_singtype(spec, opts):
    v = spec.variety()
    verdict = singularity_type(v, opts.coarsen)
    return {"summary": str(verdict), "kind": verdict.kind,
            "witnesses": [fmt_vec(w) for w in verdict.witnesses]}


def report_decompose(spec, opts):
    arr = ArrangementData(spec.A)
    comps = decompose(arr)
    return {
        "summary": "indecomposable" if len(comps) == 1 else f"{len(comps)} components",
        "components": [list(c) for c in comps],
        "position": position_type(arr),
        "flats": [f"rank {k}: " + " ".join(_block_set(F) for F in fl)
                  for k, fl in sorted(flats(arr).items())],
        "indecomposable_with_exponents": is_indecomposable(arr, spec.exponents()),
    }


def report_classify(opts):
    cfg = SearchConfig(picard=opts.picard, isotropy=opts.isotropy,
                       cases=tuple(opts.case) if opts.case else None,
                       window=opts.window, jobs=opts.jobs)
    res = run_search(cfg)
    dd = dedupe(res.accepted)
    known = {normal_form_key(ring): name for name, ring in reference_rings().items()}
    rows = []
    for c in dd.representatives:
        rec = c.record()
        rows.append({
            "case": rec["case"], "params": rec["params"],
            "class_group": f"Z^{c.class_group[0]}"
                           + "".join(f" + Z/{t}" for t in c.class_group[1]),
            "n": rec["n"], "m": rec["m"],
            "singularity": rec["singularity"], "on_wall": c.on_wall,
            "members": len(dd.groups[c.key]),
            "known_as": known.get(c.key),
        })
    return {
        "summary": f"{len(dd.representatives)} classes from {len(res.accepted)} "
                   f"accepted of {len(res.analyzed)} analyzed points",
        "classes": rows,
        "possible_isomorphisms": len(dd.flags),
        "failures": [f"{name} {list(vals)}: {msg}" for name, vals, msg in res.failures],
    }


def report_product(opts):
    a = tuple(int(x) for x in opts.a.split(","))
    mem = product_family(opts.k1, opts.k2, a)
    parts = [mem.smooth, "Fano" if mem.fano else "not Fano", f"dim {mem.dim}"]
    return {
        "summary": ", ".join(parts),
        "k1": mem.k1, "k2": mem.k2, "a": list(mem.a),
        "degree_matrix": [list(r) for r in mem.Q],
        "anticanonical": fmt_vec(mem.anticanonical),
        "smoothness": mem.smooth, "fano": mem.fano, "dimension": mem.dim,
    }


FILE_REPORTS = {
    "ring": report_ring, "variety": report_variety, "trop": report_trop,
    "acomplex": report_acomplex, "singtype": report_singtype, "fano": report_fano,
    "decompose": report_decompose,
}


def run_command(spec, command, opts=None):
    """Report (a dict) for one command; file commands need a spec."""
    opts = opts or default_options()
    if command == "classify":
        return report_classify(opts)
    if command == "product":
        return report_product(opts)
    if command not in FILE_REPORTS:
        raise ValueError(f"unknown command {command!r}")
    rep = FILE_REPORTS[command](spec, opts)
    if command != "decompose":
        rep = {"variables": header(spec.ring()), **rep}
    return rep


# -- rendering ------------------------------------------------------------------------

def _scalar(x):
    if isinstance(x, bool):
        return "yes" if x else "no"
    if x is None:
        return "-"
    return str(x)


def render_text(report, indent=0):
    pad = "  " * indent
    lines = []
    for key, val in report.items():
        if key == "summary" and indent == 0:
            continue
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines += render_text(val, indent + 1).splitlines()
        elif isinstance(val, list) and any(isinstance(x, (dict, list)) for x in val):
            lines.append(f"{pad}{key}:")
            for item in val:
                if isinstance(item, dict):
                    sub = render_text(item, indent + 2).splitlines()
                    lines.append(f"{pad}  - {sub[0].strip()}")
                    lines += sub[1:]
                else:
                    lines.append(f"{pad}  - {_scalar(item)}")
        elif isinstance(val, list):
            if not val:
                lines.append(f"{pad}{key}: -")
            elif all(isinstance(x, (int, str)) and len(str(x)) < 4 for x in val):
                lines.append(f"{pad}{key}: {' '.join(_scalar(x) for x in val)}")
            else:
                lines.append(f"{pad}{key}:")
                lines += [f"{pad}  {_scalar(x)}" for x in val]
        else:
            lines.append(f"{pad}{key}: {_scalar(val)}")
    if indent == 0 and "summary" in report:
        lines.append(report["summary"])
    return "\n".join(lines) + "\n"


def render(report, output="text"):
    if output == "json":
        return json.dumps(report, indent=2) + "\n"
    return render_text(report)


# -- entry point ----------------------------------------------------------------------

def _coarsen(value):
    return {"auto": None, "yes": True, "no": False}[value]


def build_parser():
    p = argparse.ArgumentParser(prog="arrvar",
                                description="Arrangement varieties: rings, fans, singularities.")
    p.add_argument("command", choices=COMMANDS + ("run",))
    p.add_argument("file", nargs="?", help="input file (file commands)")
    p.add_argument("--output", choices=("text", "json"), default="text")
    p.add_argument("--coarsen-trop", choices=("auto", "yes", "no"), nargs="?",
                   const="yes", default="auto",
                   help="nested-set structure on trop(X); auto uses it when connected")
    p.add_argument("--picard", type=int, choices=(1, 2), default=None)
    p.add_argument("--isotropy", type=int, default=2)
    p.add_argument("--case", action="append", default=None,
                   help="restrict classify to a case (1a, 1b, 2a, 2b, 2c); repeatable")
    p.add_argument("--window", type=int, default=6)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--k1", type=int)
    p.add_argument("--k2", type=int)
    p.add_argument("--a", type=str)
    return p


def default_options():
    opts = build_parser().parse_args(["classify"])
    opts.coarsen = None
    return opts


def main(argv=None):
    parser = build_parser()
    opts = parser.parse_args(argv)
    opts.coarsen = _coarsen(opts.coarsen_trop)
    command = opts.command
    spec = None
    if command in FILE_COMMANDS or command == "run":
        if not opts.file:
            parser.error(f"{command} needs an input file")
        try:
            with open(opts.file, encoding="utf-8") as fh:
                spec = parse_input(fh.read())
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        except InputError as exc:
            print(f"error: {opts.file}: {exc}", file=sys.stderr)
            return 2
        if command == "run":
            if spec.task is None:
                print(f"error: {opts.file}: no [task] section", file=sys.stderr)
                return 2
            command = spec.task
    elif command == "product" and None in (opts.k1, opts.k2, opts.a):
        parser.error("product needs --k1, --k2 and --a")
    try:
        report = run_command(spec, command, opts)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(render(report, opts.output))
    return 0


if __name__ == "__main__":
    sys.exit(main())
