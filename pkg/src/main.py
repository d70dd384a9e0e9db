# src/main.py
#18 Oct 2026

# --- Standard Library ---
import argparse
import itertools
import logging
import sys
from pathlib import Path

# --- Third-Party ---
from pydantic import ValidationError

# --- Local ---
from src.logging_utils import ExperimentLoggingAdapter, configure_logger
from src.models.experiment_config import (
    AdvectionSpectrumConfig,
    EulerSpectrumConfig,
    FluxCheckConfig,
    HartenScanConfig,
    MeansTableConfig,
    PerturbConfig,
    SbpDumpConfig,
    SimulateConfig,
)
from src.numerics import dgsem2d, linstab, means, sbp1d, timeloop, twopoint
from src.numerics.errors import ConfigError, SplitFormError
from src.numerics.euler import GasModel, HartenEntropy
from src.preferences import get_log_path, get_output_dir, load_config
from src.system.output import write_csv, write_json

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CRASH = 2

GLOBAL_KEYS = ("gamma", "cfl", "seed", "threads", "log_dir", "log_level")
# config keys that only some subcommands accept
COMMAND_KEYS = ("ic",)


class CliParser(argparse.ArgumentParser):
    """Usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _add_operator_options(parser):
    parser.add_argument("--family", required=True, help="fd2, fd4, cg or dg")
    parser.add_argument("--nodes", type=int, help="node count (fd2/fd4)")
    parser.add_argument("--elements", type=int, help="element count (cg/dg)")
    parser.add_argument("--degree", type=int, help="polynomial degree (cg/dg)")


def _add_euler_options(parser, surface_default=None):
    parser.add_argument("--flux", default="shima", help="volume flux: central, shima, ranocha or kuya")
    parser.add_argument("--surface-flux", default=surface_default, help="surface flux (default: the volume flux)")
    parser.add_argument("--degree", type=int, default=5)
    parser.add_argument("--elements", type=int, default=4, help="elements per direction")
    parser.add_argument("--ic", help="named initial condition (default: density_wave)")


def build_parser() -> CliParser:
    parser = CliParser(prog="splitform-lab", description="Split-form flux and stability experiments.")
    parser.add_argument("--gamma", type=float, help="ratio of specific heats (default 1.4)")
    parser.add_argument("--cfl", type=float, help="relative CFL number (default 0.05)")
    parser.add_argument("--seed", type=int, help="seed for randomized checks (default 0)")
    parser.add_argument("--threads", type=int, help="worker threads (default 1)")
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--log-dir", type=Path, help="directory for the run log")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")

    commands = parser.add_subparsers(dest="command", required=True)

    group = commands.add_parser("means").add_subparsers(dest="action", required=True)
    p = group.add_parser("table", help="all six two-point means of a and b")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--out", type=Path)
    p.set_defaults(handler=cmd_means_table, model=MeansTableConfig)

    group = commands.add_parser("flux").add_subparsers(dest="action", required=True)
    p = group.add_parser("check", help="randomized EC/KEP/PEP residuals of a flux")
    p.add_argument("--flux", required=True)
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--out", type=Path)
    p.set_defaults(handler=cmd_flux_check, model=FluxCheckConfig)

    group = commands.add_parser("harten").add_subparsers(dest="action", required=True)
    p = group.add_parser("scan", help="EC residual of Harten entropies with an arithmetic density flux")
    p.add_argument("--entropy", default="standard", help="standard or alpha")
    p.add_argument("--alpha", type=float)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--tolerance", type=float, default=1.0e-6)
    p.add_argument("--out", type=Path)
    p.set_defaults(handler=cmd_harten_scan, model=HartenScanConfig)

    group = commands.add_parser("sbp").add_subparsers(dest="action", required=True)
    p = group.add_parser("dump", help="nodes and nonzero entries of D and M")
    _add_operator_options(p)
    p.add_argument("--out", type=Path)
    p.set_defaults(handler=cmd_sbp_dump, model=SbpDumpConfig)

    group = commands.add_parser("spectrum").add_subparsers(dest="action", required=True)
    p = group.add_parser("advection1d", help="spectrum of nonlinear-flux linear advection")
    _add_operator_options(p)
    p.add_argument("--mean", default="arithmetic")
    p.add_argument("--refine", type=_int_list, help="comma-separated sizes for a refinement study")
    p.add_argument("--epsilon-scale", type=float)
    p.add_argument("--out", type=Path)
    p.set_defaults(handler=cmd_spectrum_advection, model=AdvectionSpectrumConfig)

    p = group.add_parser("euler2d", help="spectrum of the split-form DGSEM at the density wave")
    _add_euler_options(p)
    p.add_argument("--epsilon-scale", type=float)
    p.add_argument("--out", type=Path)
    p.set_defaults(handler=cmd_spectrum_euler, model=EulerSpectrumConfig)

    group = commands.add_parser("simulate").add_subparsers(dest="action", required=True)
    p = group.add_parser("euler2d", help="run the 2D density wave")
    _add_euler_options(p)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--out", type=Path)
    p.add_argument("--snapshot-interval", type=float)
    p.add_argument("--snapshot-dir", type=Path)
    p.add_argument("--fail-on-crash", action="store_true")
    p.set_defaults(handler=cmd_simulate, model=SimulateConfig)

    group = commands.add_parser("perturb").add_subparsers(dest="action", required=True)
    p = group.add_parser("euler2d", help="growth of a dominant-eigenvector perturbation")
    _add_euler_options(p, surface_default="shima")
    p.add_argument("--amplitude", type=float, default=1.0e-3)
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--out", type=Path)
    p.add_argument("--fail-on-crash", action="store_true")
    p.set_defaults(handler=cmd_perturb, model=PerturbConfig)

    return parser


def resolve_options(args: argparse.Namespace, logger=None) -> tuple[object, dict]:
    """
    Explicit flags win over --config, which wins over the stored config and defaults.
    Returns the validated subcommand model and the merged config dict.
    """
    logger = logger or logging.getLogger(__name__)
    config = load_config(args.config, logger=logger)
    values = {k: v for k, v in vars(args).items()
              if k not in ("command", "action", "handler", "model", "config") and v is not None}
    for key in GLOBAL_KEYS:
        if key not in values and config.get(key) is not None:
            values[key] = config[key]
    for key in COMMAND_KEYS:
        if key not in values and key in args.model.model_fields and config.get(key) is not None:
            values[key] = config[key]
    try:
        return args.model(**values), config
    except ValidationError as e:
        raise ConfigError(f"invalid options for {args.command} {args.action}:\n{e}") from e


# --- commands ---

def cmd_means_table(cfg: MeansTableConfig, config: dict, logger) -> int:
    rows = means.table(cfg.a, cfg.b)
    write_csv(cfg.out, ("kind", "value"), rows, logger=logger)
    return EXIT_OK


def cmd_flux_check(cfg: FluxCheckConfig, config: dict, logger) -> int:
    report = twopoint.check_flux(cfg.flux, cfg.pairs, cfg.seed, GasModel(cfg.gamma), logger=logger)
    write_json(cfg.out, report.to_dict(), logger=logger)
    return EXIT_OK


def cmd_harten_scan(cfg: HartenScanConfig, config: dict, logger) -> int:
    h = HartenEntropy.standard() if cfg.entropy == "standard" else HartenEntropy.alpha_family(cfg.alpha)
    result = twopoint.harten_scan(h, GasModel(cfg.gamma), cfg.trials, seed=cfg.seed,
                                  tolerance=cfg.tolerance, threads=cfg.threads, logger=logger)
    summary = result.summary()
    summary.update({"gamma": cfg.gamma, "seed": cfg.seed})
    logger.info(f"[Harten] {summary}")
    write_csv(cfg.out, twopoint.HARTEN_HEADER, result.rows(), logger=logger)
    if cfg.out is not None:
        write_json(cfg.out.with_suffix(".json"), summary, logger=logger)
    return EXIT_OK


def cmd_sbp_dump(cfg: SbpDumpConfig, config: dict, logger) -> int:
    op = sbp1d.build_operator(cfg.family, cfg.size, degree=cfg.degree, logger=logger)
    rows = list(sbp1d.node_rows(op)) + list(sbp1d.operator_rows(op))
    write_csv(cfg.out, ("matrix", "i", "j", "value"), rows, logger=logger)
    return EXIT_OK


def cmd_spectrum_advection(cfg: AdvectionSpectrumConfig, config: dict, logger) -> int:
    if cfg.refine:
        rows = linstab.refinement_study(cfg.family, cfg.refine, cfg.mean, cfg.degree,
                                        threads=cfg.threads, logger=logger)
        write_csv(cfg.out, ("size", "max_real"), rows, logger=logger)
        return EXIT_OK

    kwargs = {"epsilon_scale": cfg.epsilon_scale} if cfg.epsilon_scale else {}
    result = linstab.advection_spectrum_experiment(cfg.family, cfg.size, cfg.mean, cfg.degree,
                                                   threads=cfg.threads, logger=logger, **kwargs)
    write_csv(cfg.out, ("re", "im"), result.rows(), logger=logger)
    return EXIT_OK


def cmd_spectrum_euler(cfg: EulerSpectrumConfig, config: dict, logger) -> int:
    kwargs = {"epsilon_scale": cfg.epsilon_scale} if cfg.epsilon_scale else {}
    result = linstab.euler_spectrum_experiment(cfg.flux, cfg.surface_flux, cfg.degree, cfg.elements,
                                               GasModel(cfg.gamma), threads=cfg.threads, ic=cfg.ic, logger=logger,
                                               **kwargs)
    write_csv(cfg.out, ("re", "im"), result.rows(), logger=logger)
    if cfg.out is not None:
        write_json(cfg.out.with_suffix(".json"), {**result.summary(), "ic": cfg.ic}, logger=logger)
    return EXIT_OK


def cmd_simulate(cfg: SimulateConfig, config: dict, logger) -> int:
    semi, u0 = dgsem2d.initial_condition_setup(cfg.ic, cfg.flux, cfg.surface_flux, cfg.degree, cfg.elements,
                                               GasModel(cfg.gamma), threads=cfg.threads, logger=logger)
    monitor = timeloop.EquilibriumMonitor.from_state(semi, u0)

    on_snapshot = None
    if cfg.snapshot_interval:
        snapshot_dir = cfg.snapshot_dir or get_output_dir(config) / "snapshots"
        counter = itertools.count()

        def on_snapshot(t, u):
            path = Path(snapshot_dir) / f"snapshot_{next(counter):05d}.csv"
            write_csv(path, dgsem2d.SNAPSHOT_HEADER, dgsem2d.snapshot_rows(semi, u), logger=logger)
            logger.debug(f"[Run] snapshot at t = {t:.6g} -> {path}")

    report, _ = timeloop.integrate(semi, u0, cfg.t_end, cfg.cfl, equilibrium=monitor,
                                   snapshot_interval=cfg.snapshot_interval, on_snapshot=on_snapshot,
                                   logger=logger)
    payload = report.to_dict()
    payload.update({"flux": semi.volume_flux.value, "surface_flux": semi.surface_flux.value,
                    "ic": cfg.ic, "degree": cfg.degree, "elements": cfg.elements, "gamma": cfg.gamma})
    write_json(cfg.out, payload, logger=logger)
    return EXIT_CRASH if report.crashed and cfg.fail_on_crash else EXIT_OK


def cmd_perturb(cfg: PerturbConfig, config: dict, logger) -> int:
    fit = linstab.perturbation_growth(cfg.flux, cfg.surface_flux, cfg.amplitude, cfg.t_end, cfg.cfl,
                                      cfg.degree, cfg.elements, GasModel(cfg.gamma),
                                      threads=cfg.threads, ic=cfg.ic, logger=logger)
    summary = fit.summary()
    summary.update({"flux": cfg.flux.value, "surface_flux": cfg.surface_flux.value, "ic": cfg.ic})
    if cfg.out is None:
        write_json(None, summary, logger=logger)
    else:
        write_csv(cfg.out, linstab.GROWTH_HEADER, fit.rows(), logger=logger)
        write_json(cfg.out.with_suffix(".json"), summary, logger=logger)
    return EXIT_CRASH if fit.crashed and cfg.fail_on_crash else EXIT_OK


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    bootstrap = logging.getLogger(__name__)
    try:
        cfg, config = resolve_options(args, logger=bootstrap)
        log_dir = cfg.log_dir or get_log_path(config)
        configure_logger(log_dir, run_label=f"{args.command} {args.action}", level=cfg.level)
    except (ConfigError, RuntimeError) as e:
        sys.stderr.write(f"splitform-lab: {e}\n")
        return EXIT_VALIDATION

    logger = ExperimentLoggingAdapter(logging.getLogger(__name__), f"{args.command} {args.action}")
    logger.info(f"[CLI] {cfg.model_dump_json()}")
    try:
        return args.handler(cfg, config, logger)
    except (SplitFormError, ValueError, RuntimeError) as e:
        logger.error(f"[CLI] {type(e).__name__}: {e}")
        return EXIT_VALIDATION


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
