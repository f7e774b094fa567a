"""Command-line front end: ``gsedetect {encode,verify,tables,montecarlo}``.

Options may also come from a ``key = value`` file passed with ``--config``;
flags given on the command line win. Output goes to stdout unless
``--output`` names a file or ``GSEDETECT_OUTPUT_DIR`` names a directory.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass

from . import analysis
from .circuits import CircuitError
from .encoding import EncodingError, build_gse, check_algebra, verify_detection_distance
from .lattice import LatticeError, build

OUTPUT_DIR_ENV = "GSEDETECT_OUTPUT_DIR"
FORMATS = ("csv", "json", "markdown")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    rows: int = 4
    cols: int = 4
    topology: str = "planar"
    connectivity: str = "reduced"
    s: float = 0.99999
    trials: int = 10000
    seed: int = 0
    format: str = "json"
    swap_accounting: str = "unit"
    swap_style: str = "cyz"
    native: bool = True
    count_bj: bool = False
    which: str = "cost"
    construct: bool = False
    output: str | None = None

    def validate(self):
        if self.topology not in ("planar", "torus"):
            raise UsageError(f"topology must be planar or torus, not {self.topology!r}")
        if self.connectivity not in ("full", "reduced"):
            raise UsageError(f"connectivity must be full or reduced, not {self.connectivity!r}")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")
        if self.swap_accounting not in ("unit", "expanded"):
            raise UsageError("swap accounting must be unit or expanded")
        if self.swap_style not in ("cnot", "cyz"):
            raise UsageError("swap style must be cnot or cyz")
        if self.which not in ("cost", "thresholds", "optimistic", "budget"):
            raise UsageError("tables --which must be cost, thresholds, optimistic or budget")
        if not 0.0 < self.s <= 1.0:
            raise UsageError("s must lie in (0, 1]")
        if self.trials < 0:
            raise UsageError("trials must be non-negative")
        if self.rows < 1 or self.cols < 1:
            raise UsageError("rows and cols must be positive")


# -- formatting ---------------------------------------------------------------

def _cell(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.6f}"
    return "" if v is None else str(v)


def format_rows(rows: list[dict], fmt: str) -> str:
    """Render a list of flat dicts as CSV, JSON or a markdown table."""
    if fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=False) + "\n"
    cols: list[str] = []
    for r in rows:
        cols += [k for k in r if k not in cols]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_cell(r.get(c)) for c in cols])
        return buf.getvalue()
    lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    for r in rows:
        lines.append("| " + " | ".join(_cell(r.get(c)) for c in cols) + " |")
    return "\n".join(lines) + "\n"


def _emit(cfg: RunConfig, text: str, stem: str, out):
    path = cfg.output
    if path is None and os.environ.get(OUTPUT_DIR_ENV):
        ext = {"csv": "csv", "json": "json", "markdown": "md"}[cfg.format]
        path = os.path.join(os.environ[OUTPUT_DIR_ENV], f"{stem}.{ext}")
    if path is None:
        out.write(text)
        return
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    out.write(f"wrote {path}\n")


def _encoding(cfg: RunConfig):
    try:
        return build_gse(build(cfg.rows, cfg.cols, cfg.topology))
    except (LatticeError, EncodingError) as exc:
        raise UsageError(str(exc)) from exc


# -- commands -----------------------------------------------------------------

def cmd_encode(cfg: RunConfig, out) -> int:
    enc = _encoding(cfg)
    if cfg.format == "json":
        _emit(cfg, enc.to_json(indent=2) + "\n", "encode", out)
        return EXIT_OK
    g = enc.graph
    rows = []
    for e in g.edges:
        rows.append({"kind": "A", "index": e.index, "where": f"{e.j}->{e.k} {e.kind}",
                     "op": enc.edge_ops[e.index].format(), "local": ""})
    for v in range(g.n_vertices):
        op = enc.vertex_ops[v]
        local = op.restrict(enc.vertex_qubits(v)).times_phase(op.phase)
        rows.append({"kind": "B", "index": v, "where": str(g.coords(v)),
                     "op": op.format(), "local": local.format()})
    for lp in g.loops:
        rows.append({"kind": "loop", "index": lp.index,
                     "where": f"{lp.kind}{'' if lp.measured else ' (unmeasured)'}",
                     "op": enc.stabilizers[lp.index].format(),
                     "local": enc.loop_local_label(lp).format()})
    _emit(cfg, format_rows(rows, cfg.format), "encode", out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out) -> int:
    from .gadgets import audit_gadgets

    enc = _encoding(cfg)
    dist = verify_detection_distance(enc)
    algebra = check_algebra(enc)
    expand = cfg.swap_style if cfg.swap_accounting == "expanded" else False
    try:
        audit = audit_gadgets(enc, ("full", "reduced"), cfg.native, expand)
    except CircuitError as exc:
        audit = {"ok": False, "error": str(exc)}
    stray = [e for e in audit.get("exceptions", []) if not e["central"]]
    ok = dist["ok"] and not algebra and audit["ok"] and not stray
    if ok and audit.get("exceptions"):
        verdict = "PASS-with-exceptions"
    else:
        verdict = "PASS" if ok else "FAIL"
    report = {
        "lattice": {"rows": cfg.rows, "cols": cfg.cols, "topology": cfg.topology},
        "verdict": verdict,
        "detection_distance": dist,
        "algebra_violations": algebra,
        "gadgets": audit,
    }
    _emit(cfg, json.dumps(report, indent=2) + "\n", "verify", out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_tables(cfg: RunConfig, out) -> int:
    if cfg.which == "cost":
        rows = [analysis.cost_table(m, n, construct=cfg.construct)
                for m, n in analysis.TABLE_SIZES]
    elif cfg.which == "thresholds":
        rows = analysis.threshold_table(s=cfg.s)
    elif cfg.which == "optimistic":
        rows = analysis.optimistic_table()
    else:
        rows = analysis.budget_table()
    _emit(cfg, format_rows(rows, cfg.format), f"table_{cfg.which}", out)
    return EXIT_OK


def cmd_montecarlo(cfg: RunConfig, out) -> int:
    from .faults import monte_carlo
    from .gadgets import error_detected_circuit

    enc = _encoding(cfg)
    circ = error_detected_circuit(enc, cfg.connectivity, cfg.native)
    stats = monte_carlo(circ, enc, cfg.s, cfg.trials, cfg.seed, count_bj=cfg.count_bj)
    row = stats.to_dict()
    row.update({"rows": cfg.rows, "cols": cfg.cols, "topology": cfg.topology,
                "connectivity": cfg.connectivity})
    _emit(cfg, format_rows([row], cfg.format), "montecarlo", out)
    return EXIT_OK


COMMANDS = {"encode": cmd_encode, "verify": cmd_verify, "tables": cmd_tables,
            "montecarlo": cmd_montecarlo}


# -- argument handling ----------------------------------------------------------

def read_config(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, dashes in keys become underscores."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for n, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key = value")
            key, val = (t.strip() for t in line.split("=", 1))
            values[key.replace("-", "_")] = val.strip("\"'")
    return values


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gsedetect",
                                     description="Fault-detecting circuits for an encoded Hubbard lattice.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    common.add_argument("--config", default=S, help="key = value file with defaults")
    common.add_argument("--format", choices=FORMATS, default=S)
    common.add_argument("--output", default=S, help="write here instead of stdout")
    lattice = argparse.ArgumentParser(add_help=False)
    lattice.add_argument("--rows", type=int, default=S)
    lattice.add_argument("--cols", type=int, default=S)
    lattice.add_argument("--topology", choices=("planar", "torus"), default=S)

    sub.add_parser("encode", parents=[common, lattice], help="dump edge, vertex and loop operators")
    p = sub.add_parser("verify", parents=[common, lattice],
                       help="exhaustive single-fault check of every gadget")
    p.add_argument("--no-native", dest="native", action="store_false", default=S,
                   help="evolve with a single-qubit central gate")
    p.add_argument("--swap-accounting", choices=("unit", "expanded"), default=S)
    p.add_argument("--swap-style", choices=("cnot", "cyz"), default=S)
    p = sub.add_parser("tables", parents=[common], help="cost and threshold tables")
    p.add_argument("--which", choices=("cost", "thresholds", "optimistic", "budget"), default=S)
    p.add_argument("--s", type=float, default=S)
    p.add_argument("--construct", action="store_true", default=S,
                   help="also build the circuits and report their counts")
    p = sub.add_parser("montecarlo", parents=[common, lattice], help="fault injection")
    p.add_argument("--s", type=float, default=S)
    p.add_argument("--trials", type=int, default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--connectivity", choices=("full", "reduced"), default=S)
    p.add_argument("--count-bj", action="store_true", default=S)
    p.add_argument("--no-native", dest="native", action="store_false", default=S)
    return parser


_TYPES = {"rows": int, "cols": int, "trials": int, "seed": int, "s": float,
          "native": _bool, "count_bj": _bool, "construct": _bool}


def make_config(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    values = {}
    if "config" in ns:
        try:
            values.update(read_config(ns.pop("config")))
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
    values.update(ns)
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise UsageError(f"unknown option(s): {', '.join(sorted(unknown))}")
    for k, conv in _TYPES.items():
        if k in values:
            try:
                values[k] = conv(values[k])
            except ValueError as exc:
                raise UsageError(f"bad value for {k}: {values[k]!r}") from exc
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        cfg = make_config(sys.argv[1:] if argv is None else argv)
        return COMMANDS[cfg.command](cfg, out)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_USAGE if exc.code else EXIT_OK
    except UsageError as exc:
        print(f"gsedetect: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def config_dict(cfg: RunConfig) -> dict:
    return asdict(cfg)
