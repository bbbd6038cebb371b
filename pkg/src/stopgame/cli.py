"""Batch front end: ``python -m stopgame <command> [options]``.

Exit codes: 0 ok, 1 usage, 2 data, 3 capacity, 4 verification failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import io as sio
from .dynkin import DynkinSpec, dynkin_closed_loop, jj_decomposition
from .errors import CapacityError, StopGameError, ValidationError
from .filtered_space import DEFAULT_ST_CAP, FLOAT, RATIONAL, enumerate_stopping_times
from .oracle import DEFAULT_MAP_CAP, D_VARIANTS, brute_game_values, d_values, families

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CAPACITY, EXIT_VERIFY = 0, 1, 2, 3, 4
COMMANDS = ("solve", "oracle", "verify", "counterexample", "refine", "report")
N_SEEDED = 20


@dataclass
class RunConfig:
    command: str
    instance: str | None = None
    mode: str = RATIONAL
    cap_stopping_times: int = DEFAULT_ST_CAP
    cap_maps: int = DEFAULT_MAP_CAP
    seed: int = 0
    out: str | None = None
    format: str = "json"
    payoff: str = "abs_time_diff"
    levels: int = 3
    inputs: tuple = ()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", help="instance JSON path or builtin:<name>")
    common.add_argument("--mode", choices=(RATIONAL, FLOAT), default=RATIONAL)
    common.add_argument("--cap-stopping-times", type=int, default=DEFAULT_ST_CAP)
    common.add_argument("--cap-maps", type=int, default=DEFAULT_MAP_CAP)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = _Parser(prog="stopgame", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("solve", parents=[common], help="value families and Dynkin values")
    sub.add_parser("oracle", parents=[common], help="exhaustive strategy-game values")
    sub.add_parser("verify", parents=[common], help="run the invariant suite")
    sub.add_parser("counterexample", parents=[common], help="run the built-in counterexample")
    ref = sub.add_parser("refine", parents=[common], help="grid-halving spread study")
    ref.add_argument("--payoff", choices=("abs_time_diff", "w_process"), default="abs_time_diff")
    ref.add_argument("--levels", type=int, default=3)
    rep = sub.add_parser("report", parents=[common], help="aggregate prior JSON reports")
    rep.add_argument("inputs", nargs="+")
    return parser


# ---------------------------------------------------------------------------
# commands: each returns (report dict, csv rows, exit code)

def _need_instance(cfg):
    if not cfg.instance:
        raise ValidationError(f"'{cfg.command}' needs --instance")
    return sio.load_instance(cfg.instance, cfg.mode)


def cmd_solve(cfg):
    name, U = _need_instance(cfg)
    sp = U.space
    times = enumerate_stopping_times(sp, cfg.cap_stopping_times)
    fams = families(U)
    D, opt = d_values(U, times=times, fams=fams, with_optimizers=True)
    closed = []
    for lo, up, tie in {(v[0], v[1], v[2]) for v in D_VARIANTS.values()}:
        spec = DynkinSpec(fams[lo], fams[up], tie)
        entry = {"lower": lo, "upper": up, "tie": tie, "ordered": spec.is_ordered()}
        if spec.is_ordered():
            sol = dynkin_closed_loop(spec)
            jj = jj_decomposition(fams[lo], fams[up], tie)
            entry.update(root_value=sol.root_value, values=list(sol.value),
                         tau_star=sio.labels(sol.tau_star), rho_star=sio.labels(sol.rho_star),
                         stop_regions=list(sol.stop_regions),
                         jj={"value": jj.value, "iterations": jj.iterations, "shift": jj.shift})
        closed.append(entry)
    closed.sort(key=lambda e: (e["lower"], e["upper"], e["tie"]))
    report = {
        "command": "solve", "instance": name, "mode": cfg.mode,
        "families": sio.family_arrays(fams),
        "d_values": D,
        "d_optimizers": {k: sio.labels(v) for k, v in opt.items()},
        "closed_loop": closed,
    }
    return report, sio.csv_rows(name, D, cfg.mode), EXIT_OK


def _oracle_report(name, U, cfg):
    times = enumerate_stopping_times(U.space, cfg.cap_stopping_times)
    gv = brute_game_values(U, cap_maps=cfg.cap_maps, times=times)
    witnesses = {k: list(m.table) for k, m in gv.witnesses.items()}
    report = {
        "instance": name, "mode": cfg.mode,
        "game_values": gv.as_dict(),
        "witnesses": witnesses,
        "manifest": [st.short() for st in times],
        "tables_scored": gv.evaluated,
    }
    wid = {k: " ".join(map(str, v)) for k, v in witnesses.items()}
    return report, sio.csv_rows(name, gv.as_dict(), cfg.mode, wid), gv


def cmd_oracle(cfg):
    name, U = _need_instance(cfg)
    report, rows, _ = _oracle_report(name, U, cfg)
    return {"command": "oracle", **report}, rows, EXIT_OK


def cmd_counterexample(cfg):
    from .fixtures import cex, cex_payoff
    from .oracle import sandwich_report

    U = cex_payoff(cex(cfg.mode))
    report, rows, gv = _oracle_report("CEX/abs_diff_f", U, cfg)
    expected = {"A_upper": 1, "A_lower": 0, "B_upper": 0, "B_lower": 1}
    match = all(U.space.isclose(gv.as_dict()[k], v) for k, v in expected.items())
    rep = sandwich_report(U, cap_maps=cfg.cap_maps, game_values=gv)
    report.update(command="counterexample", expected=expected, matches_expected=match,
                  sandwich={c.name: c.status for c in rep.checks})
    ok = match and rep.all_pass
    return report, rows, EXIT_OK if ok else EXIT_VERIFY


def _verify_job(job):
    """Worker: rebuild the instance from its key, run the suite, return plain dicts."""
    from .fixtures import binary_tree, builtin_fixtures, random_table_payoff
    from .verification import verify_instance

    kind, key, mode, cap_st, cap_maps = job
    if kind == "builtin":
        U = builtin_fixtures(mode)[key]
    elif kind == "seeded":
        depth, seed = key
        U = random_table_payoff(binary_tree(depth, mode=mode), seed)
        key = f"B{depth}/seed{seed}"
    else:
        key, U = sio.load_instance(key, mode)
    results = verify_instance(key, U, cap_st, cap_maps)
    return [{"instance": r.instance, "check": r.check, "status": r.status, "detail": r.detail}
            for r in results]


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("STOPGAME_THREADS", "1")))
    except ValueError:
        return 1


def cmd_verify(cfg):
    from .fixtures import builtin_fixtures

    if cfg.instance:
        jobs = [("file", cfg.instance, cfg.mode, cfg.cap_stopping_times, cfg.cap_maps)]
        if cfg.instance.startswith(sio.BUILTIN_PREFIX):
            sio.load_instance(cfg.instance, cfg.mode)  # validate the name early
    else:
        jobs = [("builtin", k, cfg.mode, cfg.cap_stopping_times, cfg.cap_maps)
                for k in builtin_fixtures(cfg.mode)]
        jobs += [("seeded", (depth, cfg.seed + i), cfg.mode, cfg.cap_stopping_times, cfg.cap_maps)
                 for depth in (1, 2) for i in range(N_SEEDED)]
    workers = min(_workers(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_verify_job, jobs))
    else:
        chunks = [_verify_job(j) for j in jobs]
    results = [r for chunk in chunks for r in chunk]
    failed = [r for r in results if r["status"] == "FAIL"]
    report = {"command": "verify", "mode": cfg.mode, "seed": cfg.seed,
              "n_checks": len(results), "n_failed": len(failed), "results": results}
    rows = [{"instance": r["instance"], "quantity": r["check"], "value_num": int(r["status"] == "PASS"),
             "value_den": 1, "mode": cfg.mode, "witness_id": ""} for r in results]
    return report, rows, EXIT_VERIFY if failed else EXIT_OK


def cmd_refine(cfg):
    from .refinement import refine_abs_time_diff, refine_w_process

    if cfg.levels < 1:
        raise ValidationError("--levels must be positive")
    if cfg.payoff == "abs_time_diff":
        rows = refine_abs_time_diff(cfg.levels, cfg.mode, cap_stopping_times=cfg.cap_stopping_times,
                                    cap_maps=cfg.cap_maps)
    else:
        rows = refine_w_process(tuple(range(2, 2 + cfg.levels)), cfg.seed, cfg.mode,
                                cfg.cap_stopping_times)
    table = [{"level": r.level, "n_steps": r.n_steps, "delta": r.delta, "spread": r.spread,
              "source": r.source, "A_upper": r.A_upper, "values": r.values, "notes": r.notes}
             for r in rows]
    report = {"command": "refine", "payoff": cfg.payoff, "mode": cfg.mode, "seed": cfg.seed,
              "rows": table}
    csv_rows = [{k: sio.scalar(v) if v is not None else "" for k, v in r.items()
                 if k not in ("values", "notes")} for r in table]
    return report, csv_rows, EXIT_OK


def cmd_report(cfg):
    runs, rows = [], []
    for path in cfg.inputs:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"{path}: cannot read report ({exc})") from exc
        runs.append({"path": path, "command": data.get("command"),
                     "instance": data.get("instance")})
        inst = data.get("instance", path)
        mode = data.get("mode", "")
        for section in ("game_values", "d_values"):
            for q, v in (data.get(section) or {}).items():
                if v is None:
                    continue
                val = Fraction(v) if isinstance(v, str) else v
                rows.extend(sio.csv_rows(inst, {q: val}, mode))
        for r in data.get("results", ()):
            rows.append({"instance": r["instance"], "quantity": r["check"],
                         "value_num": int(r["status"] == "PASS"), "value_den": 1,
                         "mode": mode, "witness_id": ""})
    report = {"command": "report", "runs": runs, "rows": rows}
    return report, rows, EXIT_OK


HANDLERS = {"solve": cmd_solve, "oracle": cmd_oracle, "verify": cmd_verify,
            "counterexample": cmd_counterexample, "refine": cmd_refine, "report": cmd_report}


def _emit(cfg, report, rows):
    if cfg.format == "csv":
        columns = list(rows[0].keys()) if rows and cfg.command == "refine" else sio.CSV_COLUMNS
        text = sio.to_csv(rows, columns)
    else:
        text = sio.dumps(report)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def run(cfg: RunConfig) -> int:
    """Execute one command and write its report; returns the exit code."""
    if cfg.command not in HANDLERS:
        print(f"unknown command {cfg.command!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report, rows, code = HANDLERS[cfg.command](cfg)
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ValidationError, OSError) as exc:
        print(f"data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except StopGameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    _emit(cfg, report, rows)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command, instance=args.instance, mode=args.mode,
        cap_stopping_times=args.cap_stopping_times, cap_maps=args.cap_maps, seed=args.seed,
        out=args.out, format=args.format,
        payoff=getattr(args, "payoff", "abs_time_diff"), levels=getattr(args, "levels", 3),
        inputs=tuple(getattr(args, "inputs", ())),
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
