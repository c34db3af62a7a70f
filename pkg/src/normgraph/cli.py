"""Command-line front end.

Exit codes: 0 PASS, 1 FAIL, 2 usage/parameter error, 3 capacity refusal,
4 indeterminate (search budget exhausted).  Standard output carries one JSON
document per command; logs go to standard error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import sys
from pathlib import Path

from . import geometry
from .gf import FieldCtx, FieldError
from .graph import DEFAULT_VERTEX_CAP, FormatError, SizingError, build, export, kst_upper_bound
from .search import DEFAULT_BUDGET, Certificate, SearchError, check_claim

log = logging.getLogger("normgraph")

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY, EXIT_INDETERMINATE = 0, 1, 2, 3, 4
VERDICT_EXIT = {"PASS": EXIT_PASS, "FAIL": EXIT_FAIL, "INDETERMINATE": EXIT_INDETERMINATE}
CSV_HEADER = ["claim", "p", "h", "t", "q", "c", "bound", "observed", "verdict"]
CLAIM_NAMES = {"ars": "ars_t", "main": "main_t_plus_1", "custom": "custom"}


@dataclasses.dataclass
class RunConfig:
    command: str
    p: int | None = None
    h: int | None = None
    t: int | None = None
    vertex_cap: int = DEFAULT_VERTEX_CAP
    budget: int = DEFAULT_BUDGET
    seed: int = 0
    samples: int | None = None
    out: str | None = None
    format: str | None = None
    exploratory: bool = False
    threads: int = 1
    claim: str | None = None
    c: int | None = None
    threshold: int | None = None
    which: str | None = None
    size: int | None = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        names = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in vars(args).items() if k in names})

    def to_argv(self) -> list[str]:
        """Command line that reproduces this run."""
        argv = [self.command]
        defaults = RunConfig(self.command)
        for f in dataclasses.fields(self):
            if f.name == "command":
                continue
            val = getattr(self, f.name)
            if val is None or (val == getattr(defaults, f.name) and f.name not in ("p", "h", "t")):
                continue
            flag = "--" + f.name.replace("_", "-")
            if isinstance(val, bool):
                if val:
                    argv.append(flag)
            else:
                argv += [flag, str(val)]
        return argv


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc) + "\n")
    sys.stdout.flush()


def _write_cert(cert: Certificate, cfg: RunConfig) -> int:
    doc = cert.to_json()
    doc["config"] = dataclasses.asdict(cfg)
    if cfg.out:
        Path(cfg.out).write_text(json.dumps(doc, indent=2) + "\n")
        log.info("certificate written to %s", cfg.out)
    _emit(doc)
    log.info("%s: %s (observed %s, bound %s)", cert.claim, cert.verdict, cert.observed, cert.bound)
    return VERDICT_EXIT[cert.verdict]


def cmd_build(cfg: RunConfig) -> int:
    G = build(cfg.p, cfg.h, cfg.t, vertex_cap=cfg.vertex_cap)
    if cfg.format:
        data = export(G, cfg.format)
        if cfg.out:
            Path(cfg.out).write_bytes(data if cfg.format != "graph6" else data + b"\n")
            log.info("wrote %s to %s", cfg.format, cfg.out)
        else:
            sys.stdout.write(data.decode().rstrip("\n") + "\n")
    _emit(G.stats().as_dict())
    return EXIT_PASS


def cmd_check(cfg: RunConfig) -> int:
    claim = CLAIM_NAMES[cfg.claim]
    G = build(cfg.p, cfg.h, cfg.t, vertex_cap=cfg.vertex_cap)
    cert = check_claim(
        G, claim, exploratory=cfg.exploratory, c=cfg.c, threshold=cfg.threshold,
        budget=cfg.budget, threads=cfg.threads,
    )
    return _write_cert(cert, cfg)


def cmd_geometry(cfg: RunConfig) -> int:
    which = cfg.which
    if which in ("general-position", "span-property"):
        ctx = FieldCtx(cfg.p, cfg.h, cfg.t)
        fn = geometry.check_general_position if which == "general-position" else geometry.check_span_property
        cert = fn(ctx, budget=cfg.budget)
    else:
        G = build(cfg.p, cfg.h, cfg.t, vertex_cap=cfg.vertex_cap)
        if which == "identity":
            samples = cfg.samples
            if samples is None and G.n > 500:
                samples = 10_000
                log.info("n = %d > 500: sampling %d pairs", G.n, samples)
            cert = geometry.check_identity(G, samples=samples, seed=cfg.seed)
        else:
            size = cfg.size or cfg.t
            cert = geometry.check_neighborhood_equality(G, size, trials=cfg.samples or 100, seed=cfg.seed)
    return _write_cert(cert, cfg)


def _report_row(doc: dict) -> dict:
    missing = [k for k in CSV_HEADER if k not in doc]
    if missing:
        raise ValueError(f"certificate lacks keys {missing}")
    row = {k: doc[k] for k in CSV_HEADER}
    row["kst_margin"] = None
    p, h, t = doc["p"], doc["h"], doc["t"]
    if None not in (p, h, t) and t >= 2:
        q = p**h
        n = q ** (t - 1) * (q - 1)
        if n <= DEFAULT_VERTEX_CAP:
            m = build(p, h, t).stats().m
            s = max(math.factorial(t - 1) + 1, t)
            row["m"] = m
            row["kst_margin"] = kst_upper_bound(n, s, t) - m
    return row


def cmd_report(args: argparse.Namespace) -> int:
    rows = []
    for path in args.inputs:
        try:
            doc = json.loads(Path(path).read_text())
            rows.append(_report_row(doc))
        except (OSError, ValueError, TypeError) as exc:
            log.error("malformed certificate %s: %s", path, exc)
            return EXIT_USAGE
    verdicts = [r["verdict"] for r in rows]
    if "FAIL" in verdicts:
        overall, code = "FAIL", EXIT_FAIL
    elif "INDETERMINATE" in verdicts:
        overall, code = "INDETERMINATE", EXIT_INDETERMINATE
    else:
        overall, code = "PASS", EXIT_PASS
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for r in rows:
                w.writerow([r[k] for k in CSV_HEADER])
    cols = CSV_HEADER + ["kst_margin"]
    table = [cols] + [[("" if r.get(k) is None else f"{r[k]:.1f}" if k == "kst_margin" else str(r[k])) for k in cols] for r in rows]
    widths = [max(len(line[i]) for line in table) for i in range(len(cols))]
    for line in table:
        print("  ".join(cell.rjust(wd) for cell, wd in zip(line, widths)), file=sys.stderr)
    _emit({"overall": overall, "rows": rows})
    return code


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="normgraph", description="Norm graph construction and K_{s,t}-freeness certificates.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def field_args(sp):
        sp.add_argument("--p", type=int, required=True, help="prime characteristic")
        sp.add_argument("--h", type=_positive, required=True, help="q = p^h")
        sp.add_argument("--t", type=int, required=True)
        sp.add_argument("--vertex-cap", type=_positive, default=DEFAULT_VERTEX_CAP)
        sp.add_argument("--out", help="output file")
        sp.add_argument("--threads", type=_positive, default=1)

    b = sub.add_parser("build", help="construct the graph, print stats")
    field_args(b)
    b.add_argument("--format", choices=["graph6", "dimacs"])

    c = sub.add_parser("check", help="search for a K_{c,s} violating a claim")
    field_args(c)
    c.add_argument("--claim", choices=sorted(CLAIM_NAMES), required=True)
    c.add_argument("--c", type=_positive, help="left side size (custom claim)")
    c.add_argument("--threshold", type=_positive, help="common-neighbour target (custom claim)")
    c.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET, help="search node cap")
    c.add_argument("--exploratory", action="store_true", help="allow runs outside the claim's hypotheses")

    g = sub.add_parser("geometry", help="verify a projective-geometry property")
    field_args(g)
    g.add_argument("--which", required=True, choices=["identity", "general-position", "span-property", "neighborhood-equality"])
    g.add_argument("--samples", type=_positive, help="sample count (pairs for identity, subsets for neighborhood-equality)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--size", type=_positive, help="subset size for neighborhood-equality (default t)")
    g.add_argument("--budget", type=_positive, default=geometry.DEFAULT_SUBSET_BUDGET, help="subset enumeration cap")

    r = sub.add_parser("report", help="summarise certificate files")
    r.add_argument("inputs", nargs="+")
    r.add_argument("--csv", help="write CSV summary here")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.command == "report":
        return cmd_report(args)
    cfg = RunConfig.from_args(args)
    if cfg.command == "check" and cfg.claim == "custom" and (cfg.c is None or cfg.threshold is None):
        parser.error("--claim custom needs --c and --threshold")
    handler = {"build": cmd_build, "check": cmd_check, "geometry": cmd_geometry}[cfg.command]
    try:
        return handler(cfg)
    except (SizingError, geometry.BudgetError) as exc:
        log.error("%s", exc)
        return EXIT_CAPACITY
    except (FieldError, SearchError, FormatError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
