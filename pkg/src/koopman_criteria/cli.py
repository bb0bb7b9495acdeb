"""Command-line entry point: koopman-criteria <command> [options].

Commands: orthogonality, irreducibility, identities-verify, commutant, series.
Exit status is 0 for definitive results, 2 for Inconclusive and 1 on errors.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, CriteriaError, ExprSyntaxError
from .series import (
    DEFAULT_C_GRID,
    DEFAULT_PHI_GRID,
    DEFAULT_S_GRID,
    DEFAULT_T_GRID,
    Grids,
    MeasureFamilySpec,
    SeriesKind,
    evaluate_series,
)
from .seqlang import parse_family

SCHEMA_VERSION = 1
DEFAULT_N_MAX = 4096
COMMANDS = ("orthogonality", "irreducibility", "identities-verify", "commutant", "series")


@dataclass
class RunConfig:
    m: int = 2
    n_max: int = DEFAULT_N_MAX
    b: list = field(default_factory=list)
    a: list = field(default_factory=list)
    index_set: str = "Z"
    grids: Grids = field(default_factory=Grids)
    seed: int = 0

    def spec(self) -> MeasureFamilySpec:
        try:
            return MeasureFamilySpec.from_strings(self.m, self.n_max, self.b, self.a, self.index_set)
        except CriteriaError as exc:
            raise ConfigError(f"invalid measure family: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n_max": self.n_max,
            "index_set": self.index_set,
            "families": {"b": list(self.b), "a": list(self.a)},
            "grids": {
                "t": list(self.grids.t),
                "s": list(self.grids.s),
                "phi": list(self.grids.phi),
                "C": [list(c) for c in self.grids.C],
            },
            "seed": self.seed,
        }


def _float_list(value, name: str) -> tuple:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"grids.{name} must be a non-empty list")
    try:
        return tuple(float(x) for x in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"grids.{name} must contain numbers") from exc


def load_config(path: str | None, n_max: int | None = None, seed: int | None = None,
                require_families: bool = True) -> RunConfig:
    raw = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc.msg} at line {exc.lineno}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    unknown = set(raw) - {"m", "n_max", "families", "grids", "seed", "index_set"}
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(sorted(unknown))}")
    cfg = RunConfig()
    if "m" in raw:
        if not isinstance(raw["m"], int) or raw["m"] < 1:
            raise ConfigError("m must be a positive integer")
        cfg.m = raw["m"]
    if "n_max" in raw:
        if not isinstance(raw["n_max"], int) or raw["n_max"] < 1:
            raise ConfigError("n_max must be a positive integer")
        cfg.n_max = raw["n_max"]
    if n_max is not None:
        if n_max < 1:
            raise ConfigError("--n-max must be positive")
        cfg.n_max = n_max
    if "seed" in raw:
        if not isinstance(raw["seed"], int):
            raise ConfigError("seed must be an integer")
        cfg.seed = raw["seed"]
    if seed is not None:
        cfg.seed = seed
    if "index_set" in raw:
        if raw["index_set"] not in ("Z", "N"):
            raise ConfigError("index_set must be 'Z' or 'N'")
        cfg.index_set = raw["index_set"]
    fams = raw.get("families")
    if fams is None:
        if require_families:
            raise ConfigError("config needs families: {b: [...], a: [...]}")
    else:
        if not isinstance(fams, dict) or set(fams) - {"b", "a"}:
            raise ConfigError("families must be an object with keys b and a")
        for key in ("b", "a"):
            rows = fams.get(key)
            if not isinstance(rows, list) or len(rows) != cfg.m or not all(isinstance(x, str) for x in rows):
                raise ConfigError(f"families.{key} must be a list of {cfg.m} strings")
            for i, text in enumerate(rows, 1):
                try:
                    parse_family(text)
                except ExprSyntaxError as exc:
                    raise ConfigError(f"families.{key}[{i}] = {text!r}: {exc.msg} at position {exc.offset}") from exc
        cfg.b, cfg.a = list(fams["b"]), list(fams["a"])
    g = raw.get("grids", {})
    if not isinstance(g, dict) or set(g) - {"t", "s", "phi", "C"}:
        raise ConfigError("grids must be an object with keys among t, s, phi, C")
    t = _float_list(g["t"], "t") if "t" in g else DEFAULT_T_GRID
    s = _float_list(g["s"], "s") if "s" in g else DEFAULT_S_GRID
    if any(x <= 0 for x in s):
        raise ConfigError("grids.s must be positive")
    phi = _float_list(g["phi"], "phi") if "phi" in g else DEFAULT_PHI_GRID
    if "C" in g:
        if not isinstance(g["C"], list) or not g["C"]:
            raise ConfigError("grids.C must be a non-empty list of pairs")
        try:
            C = tuple((float(c[0]), float(c[1])) for c in g["C"])
        except (TypeError, ValueError, IndexError) as exc:
            raise ConfigError("grids.C must contain pairs of numbers") from exc
        if any(c == (0.0, 0.0) for c in C):
            raise ConfigError("grids.C must not contain (0, 0)")
    else:
        C = DEFAULT_C_GRID
    cfg.grids = Grids(t=t, s=s, phi=phi, C=C)
    return cfg


# -- argument parsing helpers ----------------------------------------------------


def _params(text: str) -> dict:
    out = {}
    if not text:
        return out
    for part in text.split(","):
        if "=" not in part:
            raise ConfigError(f"expected name=value, got {part!r}")
        k, v = part.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError as exc:
            raise ConfigError(f"parameter {k.strip()} needs a number, got {v!r}") from exc
    return out


def parse_element(text: str):
    """E12:t=1, E21:t=1, E12P1:t=1, E21P2:t=1, tau-minus:phi=0.5,s=2, diag:a=2."""
    from . import ortho

    label, _, rest = text.partition(":")
    p = _params(rest)
    key = label.strip().lower()
    builders = {
        "e12": (ortho.E12, ("t",)),
        "e21": (ortho.E21, ("t",)),
        "e12p1": (ortho.E12P1, ("t",)),
        "e21p2": (ortho.E21P2, ("t",)),
        "tau-minus": (ortho.tau_minus, ("phi", "s")),
        "diag": (ortho.diag_element, ("a",)),
    }
    if key not in builders:
        raise ConfigError(f"unknown element {label!r}; expected one of {', '.join(builders)}")
    fn, names = builders[key]
    missing = [n for n in names if n not in p]
    extra = sorted(set(p) - set(names))
    if missing or extra:
        raise ConfigError(f"element {label} takes parameters {', '.join(names)}")
    return fn(*(p[n] for n in names))


_KIND_PARAMS = {
    "SL": ("k", "n"),
    "SLminus": ("k", "n", "t"),
    "Sigma1": ("s",),
    "Sigma2s": ("s",),
    "Sigma2minus": ("phi", "s"),
    "Sigma12minus": ("phi", "s"),
    "Sigma2C": ("c1", "c2"),
    "NormCombo": ("c1", "c2"),
    "FplusSG": ("s",),
    "F1minusCG1": ("C",),
    "F2minusCG2": ("C",),
}
_PLAIN_KINDS = ("SL11", "SL22", "RatioB12", "RatioB21", "NormF", "NormG", "NormF1", "NormG1", "NormF2", "NormG2")


def parse_kind(text: str) -> SeriesKind:
    """e.g. SL:k=1,n=2 | SLminus:k=1,n=2,t=2 | Sigma1:s=1 | Sigma2C:c1=1,c2=0 | NormF."""
    tag, _, rest = text.partition(":")
    tag = tag.strip()
    if tag in _PLAIN_KINDS:
        if rest:
            raise ConfigError(f"series kind {tag} takes no parameters")
        return SeriesKind(tag)
    if tag not in _KIND_PARAMS:
        raise ConfigError(f"unknown series kind {tag!r}")
    p = _params(rest)
    names = _KIND_PARAMS[tag]
    if sorted(p) != sorted(names):
        raise ConfigError(f"series kind {tag} takes parameters {', '.join(names)}")
    vals = []
    for n in names:
        v = p[n]
        if n in ("k", "n"):
            if v not in (1.0, 2.0):
                raise ConfigError(f"{n} must be 1 or 2")
            v = int(v)
        vals.append(v)
    return SeriesKind(tag, tuple(vals))


# -- report output -----------------------------------------------------------------


def _clean(obj):
    """JSON-safe copy: non-finite floats become strings, numpy scalars become Python ones."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj


def render_report(command: str, config: dict, result: dict) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "config": config, "result": result}
    return json.dumps(_clean(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write(path: str | None, text: str):
    if path is None:
        return
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write report {path}: {exc.strerror}") from exc


# -- commands ------------------------------------------------------------------------


def cmd_orthogonality(args) -> tuple[dict, dict, str, int]:
    from . import ortho

    cfg = load_config(args.config, args.n_max, args.seed)
    spec = cfg.spec()
    if args.element:
        elem = parse_element(args.element)
        if elem.array.shape != (spec.m, spec.m):
            raise ConfigError(f"element {elem.describe()} is 2x2 but m = {spec.m}")
        res = ortho.orthogonal_general(spec, elem)
        result = {"element": elem.describe(), "verdict": res.tag, "condition": res.to_dict(traces=True)}
        status = res.tag
        summary = f"{elem.describe()}: {res.tag} ({res.verdict.method})"
    else:
        if spec.m == 1:
            rep = ortho.canonical_battery_m1(spec)
        elif spec.m == 2:
            rep = ortho.canonical_battery_m2(spec, grids=cfg.grids)
        else:
            raise ConfigError("the canonical battery covers m = 1 and m = 2; use --element for a single test")
        result = rep.to_dict(traces=True)
        status = rep.overall
        lines = [f"battery: {rep.overall}"]
        lines += [f"  ({c.name}) {c.tag}" + (f" -- fails at {c.failing}" if c.failing else "") for c in rep.conditions]
        summary = "\n".join(lines)
    return cfg.to_dict(), result, summary, 2 if status == "Inconclusive" else 0


def cmd_irreducibility(args):
    from .irred import irreducibility_verdict

    cfg = load_config(args.config, args.n_max, args.seed)
    rep = irreducibility_verdict(cfg.spec(), grids=cfg.grids)
    lines = [f"verdict: {rep.verdict}", f"battery: {rep.orthogonality.overall}"]
    if rep.case is not None:
        c = rep.case
        lines.append(f"case: table I {c.tableI}, table II {c.tableII}, split {c.split}, approximable {c.approximable}"
                     + (f" (+{','.join(c.flags)})" if c.flags else ""))
    return cfg.to_dict(), rep.to_dict(traces=True), "\n".join(lines), 2 if rep.verdict == "Inconclusive" else 0


def cmd_identities(args):
    from .verify import run_identity_suites

    cfg = load_config(args.config, args.n_max, args.seed, require_families=False)
    res = run_identity_suites(seed=cfg.seed, count=args.count)
    ok = all(r["passed"] for r in res.values())
    lines = [f"{name}: {'pass' if r['passed'] else 'FAIL'} ({r['instances']} instances, "
             f"max rel err {r['max_rel_error']:.2e})" for name, r in res.items()]
    return {"seed": cfg.seed, "count": args.count}, {"suites": res, "all_passed": ok}, "\n".join(lines), 0 if ok else 1


_EXAMPLE_RE = re.compile(r"^schur-weyl-(\d+)-(\d+)$")


def cmd_commutant(args):
    from . import commlab

    name = args.example or "s3-coset"
    seed = 0 if args.seed is None else args.seed
    if name == "s3-coset":
        res = commlab.s3_coset_example()
        summary = f"S3 coset representation: commutant dimension {res['commutant_dimension']}"
        ok = res["commutant_dimension"] == 2 and res["invariant_vector_fixed"]
    elif name in ("dixmier-z2", "dixmier-z4", "dixmier-s3"):
        table = {"dixmier-z2": commlab.cyclic_table(2), "dixmier-z4": commlab.cyclic_table(4),
                 "dixmier-s3": commlab.symmetric_table(3)}[name]
        res = commlab.dixmier_check(table)
        summary = (f"|G| = {res['order']}: commutant of right regular {res['commutant_of_right_dimension']}, "
                   f"left regular algebra {res['left_algebra_dimension']}")
        ok = res["holds"]
    else:
        m = _EXAMPLE_RE.match(name)
        if not m:
            raise ConfigError(f"unknown example {name!r}; use s3-coset, dixmier-z2, dixmier-z4, dixmier-s3 "
                              "or schur-weyl-M-N")
        res = commlab.schur_weyl_check(int(m.group(1)), int(m.group(2)), seed=seed)
        summary = (f"(R^{res['m']})^{res['n']}: permutation span {res['permutation_span_dimension']}, "
                   f"commutant of GL side {res['commutant_of_gl_dimension']}")
        ok = res["mutual_commutants"] and res["double_commutant_closure"]
    return {"example": name, "seed": seed}, res, summary, 0 if ok else 1


def cmd_series(args):
    if not args.kind:
        raise ConfigError("series needs --kind (e.g. SL:k=1,n=2 or Sigma1:s=1)")
    cfg = load_config(args.config, args.n_max, args.seed)
    kind = parse_kind(args.kind)
    res = evaluate_series(cfg.spec(), kind)
    v = res.verdict
    summary = f"{kind.label()}: {v.tag} ({v.method})"
    return cfg.to_dict(), {"kind": kind.label(), **res.to_dict()}, summary, 2 if v.tag == "Inconclusive" else 0


HANDLERS = {
    "orthogonality": cmd_orthogonality,
    "irreducibility": cmd_irreducibility,
    "identities-verify": cmd_identities,
    "commutant": cmd_commutant,
    "series": cmd_series,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="koopman-criteria",
                                description="Orthogonality and irreducibility criteria for Gaussian product measures.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", help="write the JSON report here ('-' for stdout)")
    p.add_argument("--n-max", type=int, dest="n_max", help="override the window N_max")
    p.add_argument("--seed", type=int, help="override the seed")
    p.add_argument("--element", help="single test element, e.g. E12:t=1 or tau-minus:phi=0.5,s=2")
    p.add_argument("--example", help="commutant example: s3-coset, dixmier-z2|z4|s3, schur-weyl-M-N")
    p.add_argument("--kind", help="series kind for the series command, e.g. SLminus:k=1,n=2,t=2")
    p.add_argument("--count", type=int, default=200, help="instances per identity suite")
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; 2 is reserved for Inconclusive here
        return 0 if exc.code in (0, None) else 1
    try:
        config, result, summary, code = HANDLERS[args.command](args)
        _write(args.out, render_report(args.command, config, result))
    except CriteriaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    # keep stdout pure JSON when the report goes there
    print(summary, file=sys.stderr if args.out == "-" else sys.stdout)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
