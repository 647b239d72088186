"""Batch command line front end.

Subcommands: enumerate, pressure, gap-profile, verify <tag>, equilibrium,
anchors. Every run reads one YAML experiment configuration, writes its
outputs plus a manifest (content hashes, status, wall clock) into the
output directory, and reports through the exit code:

0 success / Pass, 2 input error, 3 budget or horizon exhausted,
4 internal inconsistency, 5 verification Fail, 6 precondition Fail.

Commands run their operations sequentially; --threads is validated and
recorded but does not change the schedule, so identical configurations
produce identical payload bytes.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path
from typing import Callable

from . import __version__
from .config import ExperimentConfig, build_potential, build_subshift, load_config
from .errors import (
    BudgetExceededError,
    ConvergenceError,
    IdentityCheckError,
    InconsistentBracketError,
    InputError,
    ReducibleGraphError,
)
from .gluing import min_gap_profile
from .potentials import Potential, variation_profile
from .pressure import anchor_sequence, partition_table, pressure_bracket
from .reports import (
    ANCHOR_HEADER,
    BRACKET_HEADER,
    GAP_HEADER,
    PARTITION_HEADER,
    RunManifest,
    bound_report_payload,
    bracket_rows,
    equilibrium_payload,
    gap_profile_rows,
    partition_rows,
    write_csv,
    write_json,
    write_manifest,
    write_words,
)
from .subshifts import DEFAULT_NODE_BUDGET, SubshiftSpec, count_language, iter_language
from .transfer import build_transfer, markov_equilibrium, perron
from .verify import (
    ALL_CHECKS,
    CHECK_DENSITY_GLUE,
    CHECK_MEASURE_LOWER,
    CHECK_PARTITION_ANCHOR,
    CHECK_PARTITION_SPEC,
    CHECK_PARTITION_TRANS,
    CHECK_SPARSE_GLUE,
    FAIL,
    HORIZON_EXHAUSTED,
    PASS,
    PRECONDITION_FAIL,
    verify_density_glue,
    verify_measure_lower,
    verify_partition_upper_anchor,
    verify_partition_upper_spec,
    verify_partition_upper_trans,
    verify_sparse_glue,
)
from .words import parse_word

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_INCONSISTENT = 4
EXIT_FAIL = 5
EXIT_PRECONDITION = 6

VERDICT_EXIT = {
    PASS: EXIT_OK,
    FAIL: EXIT_FAIL,
    PRECONDITION_FAIL: EXIT_PRECONDITION,
    HORIZON_EXHAUSTED: EXIT_BUDGET,
}


class _Run:
    """Shared per-invocation state: config, output dir, manifest."""

    def __init__(self, args):
        self.cfg: ExperimentConfig = load_config(args.config)
        self.digest = self.cfg.digest
        self.budget = args.budget if args.budget else DEFAULT_NODE_BUDGET
        if self.budget < 1:
            raise InputError("--budget must be a positive node count")
        self.threads = args.threads
        if self.threads < 1:
            raise InputError("--threads must be >= 1")
        self.spec: SubshiftSpec = build_subshift(self.cfg.subshift)
        self.pot: Potential = build_potential(self.cfg.potential, self.spec)
        self.out = Path(args.out) if args.out else Path(self.cfg.output_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.manifest = RunManifest(config_digest=self.digest, command=args.command)
        self.manifest.status["threads"] = self.threads
        self.started = time.monotonic()

    def check_params(self, name: str) -> dict:
        params = self.cfg.checks.get(name, {})
        if not isinstance(params, dict):
            raise InputError(f"checks.{name} must be a mapping")
        return params

    def gap_callable(self) -> Callable[[int], int]:
        if self.spec.declared_gap is None:
            raise InputError(
                f"{self.spec.family} declares no gap bound; set one in the config"
            )
        return self.spec.declared_gap

    def variation_callable(self) -> Callable[[int], float]:
        horizon = self.cfg.horizons.var_horizon
        if horizon is None:
            horizon = (self.cfg.horizons.n_max + 1) // 2
        profile = variation_profile(self.pot, self.spec, horizon, self.budget)
        return profile.g_at

    def pressure_value(self, params: dict, table) -> float:
        source = params.get("pressure", "transfer" if self.cfg.horizons.n_state else "bracket")
        if isinstance(source, (int, float)) and not isinstance(source, bool):
            return float(source)
        if source == "transfer":
            n_state = self.cfg.horizons.n_state
            if n_state is None:
                raise InputError("pressure source 'transfer' needs horizons.n_state")
            model = build_transfer(self.spec, self.pot, n_state, self.budget)
            return math.log(perron(model, tol=self.cfg.tolerances.perron).lam)
        if source == "bracket":
            bracket = pressure_bracket(
                self.spec, self.pot, table,
                g=self._bracket_g(), tol=self.cfg.tolerances.margin,
            )
            return bracket.best_hi
        raise InputError(f"unknown pressure source {source!r}")

    def _bracket_g(self):
        horizon = self.cfg.horizons.var_horizon
        if horizon is None:
            horizon = (self.cfg.horizons.n_max + 1) // 2
        return variation_profile(self.pot, self.spec, horizon, self.budget)

    def finish(self, extra_status: dict | None = None) -> None:
        if extra_status:
            self.manifest.status.update(extra_status)
        self.manifest.wall_clock_s = time.monotonic() - self.started
        write_manifest(self.manifest, self.out)


def _n_range(params: dict, default: list[int]) -> list[int]:
    raw = params.get("n_range", default)
    ns = [int(n) for n in raw]
    if not ns:
        raise InputError("n_range must be non-empty")
    return ns


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_enumerate(run: _Run) -> int:
    cfg = run.cfg
    counts = []
    for n in range(1, cfg.horizons.n_max + 1):
        counts.append((n, count_language(run.spec, n, run.budget)))
    path = write_csv(run.out / "counts.csv", ("n", "count"), counts, run.digest)
    run.manifest.record(path)
    n = cfg.horizons.n_max
    path = write_words(
        run.out / f"language_n{n}.txt", iter_language(run.spec, n, run.budget)
    )
    run.manifest.record(path)
    run.finish({"enumerate": {"n_max": n, "count": counts[-1][1]}})
    print(f"{run.spec.label}: |L_{n}| = {counts[-1][1]}")
    return EXIT_OK


def cmd_pressure(run: _Run) -> int:
    cfg = run.cfg
    table = partition_table(run.spec, run.pot, cfg.horizons.n_max, run.budget)
    path = write_csv(
        run.out / "partition.csv", PARTITION_HEADER, partition_rows(table),
        run.digest, flags={"upper_bound_only": table.upper_bound_only},
    )
    run.manifest.record(path)
    bracket = pressure_bracket(
        run.spec, run.pot, table, g=run._bracket_g(), tol=cfg.tolerances.margin
    )
    path = write_csv(
        run.out / "bracket.csv", BRACKET_HEADER, bracket_rows(bracket),
        run.digest,
        flags={
            "best_lo": bracket.best_lo,
            "best_hi": bracket.best_hi,
            "upper_bound_only": bracket.upper_bound_only,
        },
    )
    run.manifest.record(path)
    status = {
        "bracket": {
            "best_lo": bracket.best_lo,
            "best_hi": bracket.best_hi,
            "width": bracket.width,
            "upper_bound_only": bracket.upper_bound_only,
        }
    }
    if cfg.horizons.n_state is not None:
        model = build_transfer(run.spec, run.pot, cfg.horizons.n_state, run.budget)
        pd = perron(model, tol=cfg.tolerances.perron)
        payload = {
            "n_state": model.n_state,
            "state_count": model.state_count,
            "lambda": pd.lam,
            "ln_lambda": math.log(pd.lam),
            "residual": pd.residual,
            "iterations": pd.iterations,
        }
        path = write_json(run.out / "transfer.json", payload, run.digest)
        run.manifest.record(path)
        status["transfer"] = {"ln_lambda": math.log(pd.lam)}
    run.finish(status)
    if bracket.upper_bound_only:
        print(f"{run.spec.label}: pressure <= {bracket.best_hi:.9f} (upper bound only)")
    else:
        print(
            f"{run.spec.label}: pressure in [{bracket.best_lo:.9f}, "
            f"{bracket.best_hi:.9f}] (width {bracket.width:.3g})"
        )
    return EXIT_OK


def cmd_gap_profile(run: _Run) -> int:
    cfg = run.cfg
    params = run.check_params("gap_profile")
    ns = _n_range(params, list(range(1, min(cfg.horizons.n_max, 8) + 1)))
    rows = []
    for n in ns:
        rows.append(
            min_gap_profile(
                run.spec, n, cfg.mode,
                m_max=cfg.horizons.m_max,
                strategy=cfg.strategy,
                budget=run.budget,
                pair_budget=cfg.pair_budget,
                seed=cfg.seed,
            )
        )
    path = write_csv(
        run.out / "gap_profile.csv", GAP_HEADER, gap_profile_rows(rows),
        run.digest, flags={"mode": cfg.mode, "strategy": cfg.strategy},
    )
    run.manifest.record(path)
    exhausted = [r.n for r in rows if r.status == "horizon_exhausted"]
    counterexamples = [r.n for r in rows if r.counterexample is not None]
    run.finish(
        {
            "gap_profile": {
                "f_empirical": {r.n: r.f_empirical for r in rows},
                "horizon_exhausted": exhausted,
                "counterexamples": counterexamples,
            }
        }
    )
    worst = max((r.f_empirical for r in rows if r.f_empirical is not None), default=None)
    print(f"{run.spec.label}: worst empirical gap {worst} over n={ns}")
    if exhausted:
        print(f"horizon exhausted at n={exhausted}", file=sys.stderr)
        return EXIT_BUDGET
    if counterexamples:
        print(f"declared bound violated at n={counterexamples}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _check_f(params: dict) -> Callable[[int], int] | None:
    """Optional constant gap-bound override for inversion experiments."""
    if "f_const" not in params:
        return None
    c = int(params["f_const"])
    return lambda n: c


def _run_check(run: _Run, tag: str):
    cfg = run.cfg
    tol = cfg.tolerances.margin
    small_default = list(range(2, min(cfg.horizons.n_max, 8) + 1))
    if tag == CHECK_DENSITY_GLUE:
        params = run.check_params(tag)
        return verify_density_glue(
            run.spec, _n_range(params, small_default),
            slack=int(params.get("slack", 4)),
            f=_check_f(params),
            budget=run.budget,
            seed=cfg.seed,
        )
    if tag == CHECK_SPARSE_GLUE:
        params = run.check_params(tag)
        return verify_sparse_glue(
            run.spec, _n_range(params, small_default),
            strategy=str(params.get("strategy", cfg.strategy)),
            f=_check_f(params),
            budget=run.budget,
            pair_budget=cfg.pair_budget,
            seed=cfg.seed,
        )
    table = partition_table(run.spec, run.pot, cfg.horizons.n_max, run.budget)
    if tag == CHECK_PARTITION_SPEC:
        params = run.check_params(tag)
        return verify_partition_upper_spec(
            table,
            run.pressure_value(params, table),
            _check_f(params) or run.gap_callable(),
            run.variation_callable(),
            run.pot.bounds.lo,
            _n_range(params, list(range(1, table.horizon + 1))),
            tol,
        )
    if tag == CHECK_PARTITION_ANCHOR:
        params = run.check_params(tag)
        epsilon = float(params.get("epsilon", 0.5))
        if "anchors" in params:
            anchors = [int(a) for a in params["anchors"]]
        else:
            eps_list = [float(e) for e in params.get("epsilons", [epsilon])]
            seq = anchor_sequence(
                run.gap_callable(), run.variation_callable(),
                table.horizon, eps_list,
            )
            if not seq.indices:
                raise InputError(
                    "no anchor lengths found below the horizon; "
                    "raise horizons.n_max or the epsilons"
                )
            anchors = list(seq.indices)
        return verify_partition_upper_anchor(
            table, run.pressure_value(params, table), anchors, epsilon, tol
        )
    if tag == CHECK_PARTITION_TRANS:
        params = run.check_params(tag)
        if "C" not in params:
            raise InputError("partition_upper_trans needs checks.partition_upper_trans.C")
        return verify_partition_upper_trans(
            table,
            run.pressure_value(params, table),
            float(params["C"]),
            int(params.get("onset", 3)),
            _check_f(params) or run.gap_callable(),
            run.variation_callable(),
            run.pot.bounds.lo,
            params.get("n_range"),
            tol,
        )
    if tag == CHECK_MEASURE_LOWER:
        params = run.check_params(tag)
        if "cylinder" not in params:
            raise InputError("measure_lower needs checks.measure_lower.cylinder")
        n_state = cfg.horizons.n_state
        if n_state is None:
            raise InputError("measure_lower needs horizons.n_state")
        model = build_transfer(run.spec, run.pot, n_state, run.budget)
        mm = markov_equilibrium(model, perron(model, tol=cfg.tolerances.perron))
        return verify_measure_lower(
            mm,
            parse_word(str(params["cylinder"])),
            _n_range(params, list(range(1, table.horizon + 1))),
            table,
            run.variation_callable(),
            tol,
            run.budget,
        )
    raise InputError(f"unknown check tag {tag!r}; choose from {ALL_CHECKS}")


def cmd_verify(run: _Run, tag: str) -> int:
    rep = _run_check(run, tag)
    path = write_json(run.out / f"report_{tag}.json", bound_report_payload(rep), run.digest)
    run.manifest.record(path)
    run.finish({"verify": {"check": tag, "verdict": rep.verdict}})
    worst = rep.min_margin()
    print(f"{tag}: {rep.verdict}" + ("" if math.isinf(worst) else f" (min margin {worst:.3g})"))
    return VERDICT_EXIT[rep.verdict]


def cmd_equilibrium(run: _Run) -> int:
    cfg = run.cfg
    n_state = cfg.horizons.n_state
    if n_state is None:
        raise InputError("equilibrium needs horizons.n_state")
    model = build_transfer(run.spec, run.pot, n_state, run.budget)
    pd = perron(model, tol=cfg.tolerances.perron)
    mm = markov_equilibrium(model, pd)
    path = write_json(run.out / "equilibrium.json", equilibrium_payload(mm, pd), run.digest)
    run.manifest.record(path)
    run.finish(
        {
            "equilibrium": {
                "ln_lambda": math.log(mm.lam),
                "entropy": mm.entropy,
                "phi_integral": mm.phi_integral,
                "identity_gap": mm.identity_gap,
            }
        }
    )
    print(
        f"{run.spec.label}: ln(lambda) = {math.log(mm.lam):.9f}, "
        f"entropy {mm.entropy:.9f}, integral {mm.phi_integral:.9f}"
    )
    return EXIT_OK


def cmd_anchors(run: _Run) -> int:
    cfg = run.cfg
    params = run.check_params("anchors")
    eps_list = [float(e) for e in params.get("epsilons", [0.5, 0.4, 0.3])]
    seq = anchor_sequence(
        run.gap_callable(), run.variation_callable(), cfg.horizons.n_max, eps_list
    )
    rows = [
        (k + 1, eps, n, score)
        for k, (eps, n, score) in enumerate(zip(seq.epsilons, seq.indices, seq.scores))
    ]
    path = write_csv(
        run.out / "anchors.csv", ANCHOR_HEADER, rows, run.digest,
        flags={"complete": seq.complete},
    )
    run.manifest.record(path)
    run.finish({"anchors": {"complete": seq.complete, "found": len(seq.indices)}})
    print(f"{run.spec.label}: anchors {list(seq.indices)} (complete: {seq.complete})")
    if not seq.complete:
        print("anchor search hit the horizon before satisfying every epsilon",
              file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftpress",
        description="Language enumeration, pressure brackets, equilibrium "
        "measures, and bound certificates for subshifts.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="YAML experiment configuration")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--budget", type=int, default=None, help="search node budget")
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap (validated and recorded; scheduling is sequential)")

    common(sub.add_parser("enumerate", help="write language counts and words"))
    common(sub.add_parser("pressure", help="write partition and bracket tables"))
    common(sub.add_parser("gap-profile", help="measure gluing gaps"))
    p = sub.add_parser("verify", help="check one bound certificate")
    p.add_argument("tag", choices=ALL_CHECKS)
    common(p)
    common(sub.add_parser("equilibrium", help="write the transfer equilibrium measure"))
    common(sub.add_parser("anchors", help="write the anchor length sequence"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = _Run(args)
        if args.command == "enumerate":
            return cmd_enumerate(run)
        if args.command == "pressure":
            return cmd_pressure(run)
        if args.command == "gap-profile":
            return cmd_gap_profile(run)
        if args.command == "verify":
            return cmd_verify(run, args.tag)
        if args.command == "equilibrium":
            return cmd_equilibrium(run)
        if args.command == "anchors":
            return cmd_anchors(run)
        raise InputError(f"unknown command {args.command!r}")
    except BudgetExceededError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InconsistentBracketError as exc:
        print(
            f"inconsistent bracket: {exc} "
            f"(best_lo={exc.best_lo!r}, best_hi={exc.best_hi!r})",
            file=sys.stderr,
        )
        return EXIT_INCONSISTENT
    except (IdentityCheckError, ReducibleGraphError, ConvergenceError) as exc:
        print(f"inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
