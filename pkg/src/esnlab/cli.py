"""``esnlab`` command-line entry point.

Each subcommand writes its CSV artifacts into ``--out``; diagnostics go to
stderr only.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import dynsys, experiment
from .config import ConfigError, RunConfig, parse_config
from .forecast import DivergenceError
from .reservoir import Esn, drive

log = logging.getLogger("esnlab")

SUBCOMMANDS = ("generate", "train", "forecast", "converge", "pca", "clt")


def fmt(value) -> str:
    """Shortest decimal that round-trips to the same float64; ints verbatim."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if value is None:
        return ""
    return repr(float(value))


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(fmt(v) for v in row) + "\n")


def write_esn(path: Path, e: Esn) -> None:
    """Dump A, C and b as consecutive blocks, each led by ``name,rows,cols``."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        for name, m in (("A", e.A), ("C", e.C), ("b", e.b[:, None])):
            f.write(f"{name},{m.shape[0]},{m.shape[1]}\n")
            for row in m:
                f.write(",".join(fmt(v) for v in row) + "\n")


def cmd_generate(cfg: RunConfig, out: Path, args) -> None:
    study = cfg.study()
    traj = dynsys.lorenz_trajectory(study.initial_state, study.lorenz, cfg.n_steps, cfg.tau)
    write_csv(
        out / "trajectory.csv",
        ("k", "t", "xi", "upsilon", "zeta"),
        ((k, k * cfg.tau, *traj[k]) for k in range(traj.shape[0])),
    )


def cmd_train(cfg: RunConfig, out: Path, args) -> None:
    study = cfg.study()
    W, pred, target = experiment.train_and_predict(study, cfg.ell, cfg.seed)
    write_csv(out / "train.csv", ("k", "pred", "u_true"), zip(range(len(pred)), pred, target))
    write_csv(out / "weights.csv", ("i", "w"), enumerate(W.W))
    if args.dump_esn:
        write_esn(out / "esn.csv", experiment.build_esn(study, cfg.seed))
    log.info("train: rmse over %d pairs = %r", len(pred), float(np.sqrt(np.mean((pred - target) ** 2))))


def cmd_forecast(cfg: RunConfig, out: Path, args) -> None:
    study = cfg.study()
    n, known = cfg.forecast_steps, min(cfg.forecast_truth_steps, cfg.forecast_steps)
    try:
        result = experiment.lorenz_forecast(study, cfg.ell, cfg.seed, n, known)
        predictions, error = result.run.predictions, None
        truth = result.truth
    except DivergenceError as exc:
        predictions, error = exc.predictions, exc
        truth = experiment.lorenz_data(study, cfg.ell + 1 + known)[study.washout + cfg.ell + 1:, 0]
    rows = ((k + 1, v, truth[k] if k < len(truth) else None) for k, v in enumerate(predictions))
    write_csv(out / "forecast.csv", ("k", "v_pred", "u_true"), rows)
    if error is not None:
        raise error


def cmd_converge(cfg: RunConfig, out: Path, args) -> None:
    rows = experiment.multi_seed_study(cfg.study())
    header = ["ell", "seed", "we", "rmse"]
    if cfg.guides:
        header += ["guide_we", "guide_rmse"]
        rows = [(*r, experiment.guide_we(r.ell), experiment.guide_rmse(r.ell)) for r in rows]
    write_csv(out / "study.csv", header, rows)


def cmd_pca(cfg: RunConfig, out: Path, args) -> None:
    study = cfg.study()
    traj = experiment.lorenz_data(study, cfg.pca_length)
    states = drive(experiment.build_esn(study, cfg.seed), traj[:, 0], None, study.washout).states
    result = experiment.pca_project(states, cfg.pca_components)
    header = ["k"] + [f"pc{i + 1}" for i in range(cfg.pca_components)]
    write_csv(out / "pca.csv", header, ((k, *row) for k, row in enumerate(result.scores)))
    write_csv(out / "pca_singular_values.csv", ("i", "singular_value"), enumerate(result.singular_values, start=1))


def cmd_clt(cfg: RunConfig, out: Path, args) -> None:
    pairs = experiment.clt_scaling(cfg.clt_observable, cfg.clt_ell_grid, cfg.clt_trials, cfg.clt_seed, burn_in=cfg.clt_burn_in)
    write_csv(out / "clt.csv", ("ell", "std"), pairs)
    if all(std > 0 for _, std in pairs) and len(pairs) > 1:
        log.info("clt: log-log slope = %r", experiment.loglog_slope(pairs))


COMMANDS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "forecast": cmd_forecast,
    "converge": cmd_converge,
    "pca": cmd_pca,
    "clt": cmd_clt,
}


def _override(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="esnlab", description="Echo State Network readout experiments on the Lorenz system.")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", type=Path, help="key = value config file")
    parser.add_argument("--seed", type=int, help="ESN seed; also restricts the seed list to this one seed")
    parser.add_argument("--ell", type=int, help="number of training pairs")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
    parser.add_argument("--set", dest="overrides", type=_override, action="append", default=[],
                        metavar="KEY=VALUE", help="override a config key; repeatable")
    parser.add_argument("--dump-esn", action="store_true", help="train: also write the ESN weights to esn.csv")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(name)s: %(message)s")
    overrides = dict(args.overrides)
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
        overrides["seeds"] = str(args.seed)
    if args.ell is not None:
        overrides["ell"] = str(args.ell)
    try:
        cfg = parse_config(args.config, overrides)
        args.out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.subcommand](cfg, args.out, args)
    except ConfigError as exc:
        print(f"esnlab: {args.subcommand}: config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, np.linalg.LinAlgError, RuntimeError, OSError) as exc:
        print(f"esnlab: {args.subcommand}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
