"""
amc-sim command line.

Subcommands:
    simulate    solve one circuit instance per trial, write output vectors and records
    sweep       cross product of circuits x sizes x technology nodes x trials
    compensate  optimal bias search (or a plain bias sweep with --ratios)
    bench       runtime scaling over ascending sizes
    oracle      full-netlist nodal solve of one instance

Exit codes: 0 success, 2 invalid input/file/config, 3 singular system, 1 other.
"""

import argparse
import copy
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from dotenv import load_dotenv

from .. import __version__
from ..compensation import BiasSearchConfig, bias_sweep, search_optimal_bias
from ..core.exceptions import InputValidationError
from ..core.model import CrossbarModel
from ..oracle import dump_netlist, ideal_egv, run_oracle
from ..services import BenchRunner, SimulationRunner, SweepRunner, build_cells, categorize_error
from ..utils.config_loader import (
    get_bench_config,
    get_compensation_config,
    get_egv_config,
    get_logging_config,
    get_oracle_config,
    get_sweep_config,
    get_workload_config,
    load_config,
)
from ..utils.logger import setup_logger
from ..utils.parse_utils import parse_float_list, parse_int_list, parse_label_list
from ..validators import MatrixValidator
from ..workload import resolve_resistance
from .io import load_matrix_csv, load_vector_csv, write_curve, write_records, write_vector_csv
from .models import BenchRecord, BiasSummaryRow, RunConfig, ScalingRow

CONFIG_ENV = "AMC_SIM_CONFIG"
THREADS_ENV = "AMC_SIM_THREADS"
DEFAULT_CONFIG_PATH = "config/config.yaml"
NODES = ("baseline", "32nm", "22nm", "16nm")


def _add_instance_args(parser: argparse.ArgumentParser, trials: bool = True) -> None:
    parser.add_argument("--circuit", required=True, choices=["inv", "egv", "mvm"])
    parser.add_argument("--n", type=int, help="Matrix size (ignored with --matrix)")
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--matrix", metavar="FILE", help="CSV conductance matrix (S)")
    source.add_argument("--gen", choices=["pd", "dds"], help="Generated matrix kind")
    _add_wire_args(parser)
    if trials:
        parser.add_argument("--trials", type=int, default=1)


def _add_wire_args(parser: argparse.ArgumentParser) -> None:
    wire = parser.add_mutually_exclusive_group()
    wire.add_argument("--r", type=float, metavar="OHMS", help="Wire segment resistance")
    wire.add_argument("--node", choices=NODES, help="Technology node preset")


def _add_output_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", metavar="PATH", help="Output table (stdout when omitted)")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amc-sim",
        description="Interconnect-aware simulation of analog matrix computing crossbars",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help=f"YAML/JSON config file (env {CONFIG_ENV})")
    parser.add_argument("--log-level", help="Override logging.level")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="Solve one circuit per trial")
    _add_instance_args(simulate)
    simulate.add_argument("--oracle", action="store_true", help="Also compare with the nodal oracle")
    simulate.add_argument("--input", metavar="FILE", help="b (inv) or v_in (mvm), one value per line")
    simulate.add_argument("--v0", type=float, help="EGV drive voltage")
    _add_output_args(simulate)

    sweep = sub.add_parser("sweep", help="Sweep sizes and technology nodes")
    sweep.add_argument("--circuits", help="Comma-separated circuits")
    sweep.add_argument("--sizes", help="Comma-separated sizes")
    sweep.add_argument("--presets", help="Comma-separated technology nodes")
    sweep.add_argument("--trials", type=int)
    sweep.add_argument("--oracle", action="store_true")
    _add_output_args(sweep)

    compensate = sub.add_parser("compensate", help="Optimal bias search")
    _add_instance_args(compensate, trials=False)
    compensate.add_argument("--trials", type=int, help="Trials per candidate")
    compensate.add_argument("--ratios", help="Evaluate only these bias ratios")
    compensate.add_argument("--curve-out", metavar="PATH", help="Curve table (default <out>_curve)")
    _add_output_args(compensate)

    bench = sub.add_parser("bench", help="Runtime scaling benchmark")
    bench.add_argument("--circuit", required=True, choices=["inv", "egv", "mvm"])
    bench.add_argument("--sizes", help="Ascending comma-separated sizes")
    bench.add_argument("--repetitions", type=int)
    _add_wire_args(bench)
    _add_output_args(bench)

    oracle = sub.add_parser("oracle", help="Full-netlist nodal solve")
    _add_instance_args(oracle, trials=False)
    oracle.add_argument("--v0", type=float, help="EGV drive voltage")
    oracle.add_argument("--dump-netlist", metavar="PATH", help="Write the netlist listing")
    _add_output_args(oracle)
    return parser


def _resolve_config(args: argparse.Namespace) -> Tuple[Dict[str, Any], Optional[str]]:
    path = args.config or os.getenv(CONFIG_ENV)
    if path is None and os.path.exists(DEFAULT_CONFIG_PATH):
        path = DEFAULT_CONFIG_PATH
    config = load_config(path)
    if args.log_level:
        config["logging"]["level"] = args.log_level
    threads = os.getenv(THREADS_ENV)
    if threads:
        try:
            config["sweep"]["max_concurrent"] = max(1, int(threads))
        except ValueError:
            raise InputValidationError(f"{THREADS_ENV} must be an integer, got '{threads}'") from None
    return config, path


def _suffixed(path: str, suffix: str) -> str:
    stem, ext = os.path.splitext(path)
    return f"{stem}_{suffix}{ext or '.csv'}"


def _emit(rows: Sequence[Any], out: Optional[str], fmt: str, header: Dict[str, Any],
          columns: List[str]) -> None:
    if out:
        write_records(out, rows, header=header, fmt=fmt, columns=columns)
        return
    frame = pd.DataFrame([r.model_dump(mode="json") for r in rows], columns=columns)
    print(frame.to_string(index=False))


class Cli:
    """Runs one parsed command against the effective configuration"""

    def __init__(self, args: argparse.Namespace, config: Dict[str, Any], logger: logging.Logger):
        self.args = args
        self.config = config
        self.logger = logger
        self.runner = SimulationRunner(config, logger)

    def header(self, **extra: Any) -> Dict[str, Any]:
        header: Dict[str, Any] = {"command": self.args.command, "version": __version__}
        header.update(extra)
        header["config"] = self.config
        return header

    def run_config(self) -> RunConfig:
        args = self.args
        return RunConfig(
            circuit=args.circuit,
            n=args.n,
            matrix_path=args.matrix,
            gen=args.gen,
            r_ohm=args.r,
            node=args.node,
            trials=getattr(args, "trials", None) or 1,
            seed=args.seed,
            oracle=getattr(args, "oracle", False) is True,
            out=args.out,
            format=args.format,
        )

    def load_matrix(self, run: RunConfig) -> Optional[np.ndarray]:
        """Validated matrix from --matrix, None when generating"""
        if run.matrix_path is None:
            return None
        matrix = load_matrix_csv(run.matrix_path)
        workload = get_workload_config(self.config)
        validator = MatrixValidator(
            g_min=workload.get("g_min", 1e-5),
            g_max=workload.get("g_max", 1e-4),
            logger=self.logger,
        )
        if not validator.validate(matrix):
            raise InputValidationError(
                f"{run.matrix_path}: " + "; ".join(validator.get_validation_errors())
            )
        if run.n is not None and run.n != matrix.shape[0]:
            raise InputValidationError(
                f"--n {run.n} does not match the {matrix.shape[0]} x {matrix.shape[0]} matrix file"
            )
        return matrix

    def model_for(
        self,
        run: RunConfig,
        matrix: Optional[np.ndarray],
        trial: int,
        workload: Optional[Dict[str, Any]] = None
    ) -> CrossbarModel:
        n = matrix.shape[0] if matrix is not None else run.n
        return self.runner.build_model(
            n, run.wire_resistance, run.seed, trial, kind=run.matrix_kind, matrix=matrix,
            workload=workload
        )

    def drive(self, run: RunConfig, n: int) -> Any:
        args = self.args
        if run.circuit == "egv":
            if getattr(args, "input", None) is not None:
                raise InputValidationError("--input does not apply to egv; use --v0 for the drive")
            v0 = getattr(args, "v0", None)
            return v0 if v0 is not None else float(get_egv_config(self.config).get("v0", 0.1))
        path = getattr(args, "input", None)
        if path is None:
            return None
        vector = load_vector_csv(path)
        if not MatrixValidator(logger=self.logger).validate_vector(vector, n):
            raise InputValidationError(f"{path}: input vector must hold {n} finite values")
        return vector

    def simulate(self) -> int:
        run = self.run_config()
        matrix = self.load_matrix(run)
        records: List[BenchRecord] = []
        for trial in range(run.trials):
            model = self.model_for(run, matrix, trial)
            result = self.runner.run_cell(
                run.circuit,
                model,
                seed=run.seed,
                trial=trial,
                node=run.node,
                oracle=run.oracle,
                drive=self.drive(run, model.n),
            )
            records.append(result.record)
            self.logger.info(
                f"{run.circuit} N={model.n} r={model.r1:g} trial {trial}: "
                f"re_vs_ideal={result.record.re_vs_ideal:.3e} re_vs_oracle={result.record.re_vs_oracle}"
            )
            if run.out:
                write_vector_csv(
                    _suffixed(run.out, f"output_t{trial}"),
                    result.output,
                    header=self.header(run=run.model_dump(), trial=trial),
                )
        _emit(records, run.out, run.format, self.header(run=run.model_dump()),
              list(BenchRecord.model_fields))
        return 0

    def sweep(self) -> int:
        args = self.args
        cfg = get_sweep_config(self.config)
        circuits = parse_label_list(args.circuits) if args.circuits else list(cfg["circuits"])
        sizes = parse_int_list(args.sizes) if args.sizes else list(cfg["sizes"])
        presets = parse_label_list(args.presets) if args.presets else list(cfg["presets"])
        trials = args.trials if args.trials is not None else int(cfg.get("trials", 1))
        cfg.update(circuits=circuits, sizes=sizes, presets=presets, trials=trials)

        cells = build_cells(circuits, sizes, presets, trials)
        self.logger.info(f"Sweeping {len(cells)} cells with {cfg['max_concurrent']} workers")
        runner = SweepRunner(
            self.config,
            seed=args.seed,
            oracle=args.oracle,
            max_concurrent=cfg["max_concurrent"],
            timeout_per_cell=cfg["timeout_per_cell"],
            logger=self.logger,
        )
        records = runner.run(cells)
        _emit(records, args.out, args.format, self.header(seed=args.seed, oracle=args.oracle),
              list(BenchRecord.model_fields))
        return 0

    def compensate(self) -> int:
        args = self.args
        run = self.run_config()
        model = self.model_for(run, self.load_matrix(run), 0,
                               workload=self.runner.compensation_workload(run.circuit))
        comp = dict(get_compensation_config(self.config))
        comp.pop("workload", None)
        if args.trials is not None:
            comp["trials_per_candidate"] = args.trials
        workload = get_workload_config(self.config)
        cfg = BiasSearchConfig(
            **comp,
            seed=run.seed,
            v0=float(get_egv_config(self.config).get("v0", 0.1)),
            g_min=workload.get("g_min", 1e-5),
            g_max=workload.get("g_max", 1e-4),
        )
        header = self.header(run=run.model_dump(), search=cfg.model_dump())
        curve_out = args.curve_out or (_suffixed(run.out, "curve") if run.out else None)

        if args.ratios:
            curve = bias_sweep(run.circuit, model, parse_float_list(args.ratios), cfg,
                               self.runner.settings, self.logger)
        else:
            result = search_optimal_bias(run.circuit, model, cfg, self.runner.settings, self.logger)
            curve = result.curve
            summary = BiasSummaryRow(
                circuit=run.circuit,
                n=model.n,
                r_ohm=model.r1,
                seed=run.seed,
                optimal_bias_ratio=result.optimal_bias_ratio,
                baseline_re=result.baseline_re,
                min_re=result.min_re,
                delta_re=result.delta_re,
            )
            self.logger.info(
                f"Optimal bias ratio {result.optimal_bias_ratio:+.6f}: "
                f"RE {result.baseline_re:.4e} -> {result.min_re:.4e} (delta {result.delta_re:.1%})"
            )
            _emit([summary], run.out, run.format, header, list(BiasSummaryRow.model_fields))

        if curve_out:
            write_curve(curve_out, curve, header=header, fmt=run.format)
        else:
            for ratio, re in curve:
                print(f"{ratio:+.6f},{re:.6e}")
        return 0

    def bench(self) -> int:
        args = self.args
        cfg = get_bench_config(self.config)
        sizes = parse_int_list(args.sizes) if args.sizes else list(cfg["sizes"])
        repetitions = args.repetitions if args.repetitions is not None else int(cfg["repetitions"])
        cfg.update(sizes=sizes, repetitions=repetitions)
        r_ohm = resolve_resistance(node="baseline") if args.r is None and args.node is None \
            else resolve_resistance(args.r, args.node)

        runner = BenchRunner(self.config, r_ohm=r_ohm, seed=args.seed, logger=self.logger)
        columns = list(ScalingRow.model_fields)
        completed: List[ScalingRow] = []

        def emit_partial(row: ScalingRow) -> None:
            completed.append(row)
            if args.out:
                write_records(args.out, completed,
                              header=self.header(circuit=args.circuit, r_ohm=r_ohm, seed=args.seed,
                                                 loglog_slope="", complete=False),
                              fmt=args.format, columns=columns)

        report = runner.run(
            args.circuit,
            sizes,
            repetitions=repetitions,
            timeout_per_size=cfg["timeout_per_size"],
            oracle_max_n=cfg["oracle_context_max_n"],
            on_row=emit_partial,
        )
        slope = "" if report.slope is None else f"{report.slope:.4f}"
        self.logger.info(f"{args.circuit} log-log runtime slope: {slope or 'n/a'}")
        _emit(report.rows, args.out, args.format,
              self.header(circuit=args.circuit, r_ohm=r_ohm, seed=args.seed, loglog_slope=slope,
                          complete=True, permc_spec=report.permc_spec, pilot_fill=report.pilot_fill),
              columns)
        return 0

    def oracle(self) -> int:
        args = self.args
        run = self.run_config()
        model = self.model_for(run, self.load_matrix(run), 0)
        oracle_cfg = get_oracle_config(self.config)
        drive = self.drive(run, model.n)
        g_lambda = None
        if run.circuit == "egv":
            g_lambda = ideal_egv(model.g)[0]
        elif drive is None:
            drive = self.runner.default_drive(run.circuit, model.n, run.seed)
        if run.circuit == "inv":
            # netlist takes injected currents, the file/generator gives b
            drive = -np.asarray(drive, dtype=float)

        result = run_oracle(
            run.circuit,
            model,
            drive,
            g_lambda=g_lambda,
            g_feedback=oracle_cfg.get("g_feedback", 1e-3),
            g_inv=oracle_cfg.get("g_inv", 1e-3),
            logger=self.logger,
        )
        stats = {
            "nodes": result.system.node_count,
            "opamps": len(result.system.opamps),
            "max_kcl_residual": f"{result.solution.max_kcl_residual:.6e}",
            "current_scale": f"{result.solution.current_scale:.6e}",
            "runtime_ms": f"{result.runtime_ms:.3f}",
        }
        self.logger.info(
            f"Oracle {run.circuit} N={model.n}: {stats['nodes']} nodes, "
            f"max KCL residual {stats['max_kcl_residual']} A"
        )
        if args.dump_netlist:
            with open(args.dump_netlist, "w", encoding="utf-8") as f:
                f.write(dump_netlist(result.system))
        if run.out:
            write_vector_csv(run.out, result.output, header=self.header(run=run.model_dump(), oracle=stats))
        else:
            for value in result.output:
                print(f"{value:.17g}")
        return 0

    def dispatch(self) -> int:
        return getattr(self, self.args.command)()


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point for ``amc-sim``; returns the process exit code"""
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config, path = _resolve_config(args)
    except Exception as e:
        category = categorize_error(e)
        print(f"amc-sim: {category.value}: {e}", file=sys.stderr)
        return category.exit_code

    log_cfg = get_logging_config(config)
    logger = setup_logger(
        name="amc_sim",
        log_file=log_cfg.get("log_file"),
        level=log_cfg.get("level", "INFO"),
        console_output=log_cfg.get("console_output", True),
    )
    logger.debug(f"Configuration from {path or 'built-in defaults'}")

    try:
        return Cli(args, copy.deepcopy(config), logger).dispatch()
    except Exception as e:
        category = categorize_error(e)
        logger.error(f"{args.command} failed ({category.value}): {e}")
        print(f"amc-sim: {category.value}: {e}", file=sys.stderr)
        return category.exit_code


if __name__ == "__main__":
    sys.exit(main())
