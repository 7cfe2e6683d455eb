"""
Runtime scaling benchmark: median timings per size and a log-log slope fit.

Every size runs in its own child process. A size that overruns its timeout
is terminated, and a size that dies (out of memory, for instance) loses only
its own row; the rows already measured are kept and reported.
"""

import asyncio
import contextlib
import logging
import math
import multiprocessing
import time
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..cli.models import ScalingRow
from ..core.exceptions import InputValidationError
from ..oracle.circuits import run_oracle
from ..oracle.ideal import ideal_egv
from ..solvers import EgvSolver, InvSolver, MvmSolver, SolverSettings
from ..solvers.base import CrossbarSolver
from ..utils.config_loader import get_bench_config
from .errors import categorize_error
from .simulation import SimulationRunner

# spawn keeps the child clear of the parent's BLAS and executor threads
_MP_CONTEXT = multiprocessing.get_context("spawn")


def fit_loglog_slope(sizes: Sequence[int], runtimes: Sequence[float]) -> Optional[float]:
    """
    Least-squares slope of log(runtime) against log(N) over the larger half
    of the sizes (at least two points).
    """
    points = [(n, t) for n, t in zip(sizes, runtimes) if t is not None and t > 0]
    if len(points) < 2:
        return None
    keep = max(2, math.ceil(len(points) / 2))
    top = points[-keep:]
    x = np.log([n for n, _ in top])
    y = np.log([t for _, t in top])
    return float(np.polyfit(x, y, 1)[0])


@dataclass(frozen=True)
class ScalingReport:
    circuit: str
    rows: List[ScalingRow]
    slope: Optional[float]
    permc_spec: str
    pilot_fill: Dict[str, int]


def _measure_in_child(
    conn: Any,
    config: Dict[str, Any],
    r_ohm: float,
    seed: int,
    circuit: str,
    n: int,
    repetitions: int,
    oracle_max_n: int
) -> None:
    """Child process entry point: send ("ok", row dict) or ("error", message) back"""
    try:
        row = BenchRunner(config, r_ohm=r_ohm, seed=seed).measure_size(
            circuit, n, repetitions, oracle_max_n
        )
        conn.send(("ok", row.model_dump()))
    except Exception as e:
        conn.send(("error", f"{categorize_error(e).value}: {e}"))
    finally:
        conn.close()


class BenchRunner:
    """Times assembly, factorization and solve one size at a time"""

    def __init__(
        self,
        config: Dict[str, Any],
        r_ohm: float = 1.0,
        seed: int = 0,
        logger: Optional[logging.Logger] = None
    ):
        self.config = config
        self.r_ohm = r_ohm
        self.seed = seed
        self.logger = logger or logging.getLogger(__name__)
        self.runner = SimulationRunner(config, self.logger)

    def _solver(self, circuit: str, n: int, repetition: int,
                settings: Optional[SolverSettings] = None) -> Tuple[CrossbarSolver, Any]:
        model = self.runner.build_model(n, self.r_ohm, self.seed, repetition)
        drive = self.runner.default_drive(circuit, n, self.seed, repetition)
        settings = settings or self.runner.settings
        if circuit == "inv":
            return InvSolver(model, settings, self.logger), -np.asarray(drive)
        if circuit == "mvm":
            return MvmSolver(model, settings, self.logger), drive
        g_lambda, _ = ideal_egv(model.g)
        return EgvSolver(model, g_lambda, settings, self.logger), drive

    def _solve_once(self, circuit: str, n: int, repetition: int):
        solver, drive = self._solver(circuit, n, repetition)
        return solver.solve(drive).diagnostics

    def _settings_with(self, permc_spec: str) -> SolverSettings:
        return SolverSettings(**{**self.runner.settings.model_dump(), "permc_spec": permc_spec})

    def pilot_fill(self, circuit: str, n: int, orderings: Sequence[str]) -> Dict[str, int]:
        """nnz(L) + nnz(U) of the size-n Jacobian under each column ordering"""
        fill: Dict[str, int] = {}
        for permc_spec in orderings:
            solver, _ = self._solver(circuit, n, 0, self._settings_with(permc_spec))
            fill[permc_spec] = solver.factorization.fill_in
            self.logger.debug(f"{circuit} pilot N={n} {permc_spec}: fill {fill[permc_spec]}")
        return fill

    def choose_ordering(self, circuit: str, n: int, orderings: Sequence[str]) -> Tuple[str, Dict[str, int]]:
        """
        Column ordering with the least fill at the pilot size (first listed wins ties).

        Raises:
            InputValidationError: no candidates, or an unknown ordering name
        """
        orderings = list(orderings)
        if not orderings:
            raise InputValidationError("At least one column ordering is needed")
        for permc_spec in orderings:
            try:
                self._settings_with(permc_spec)
            except ValueError:
                raise InputValidationError(f"Unknown column ordering '{permc_spec}'") from None
        if len(orderings) == 1:
            return orderings[0], {}
        fill = self.pilot_fill(circuit, n, orderings)
        best = min(orderings, key=lambda spec: fill[spec])
        self.logger.info(
            f"{circuit}: column ordering {best} at pilot N={n} "
            f"(fill {', '.join(f'{k}={v}' for k, v in fill.items())})"
        )
        return best, fill

    def measure_size(self, circuit: str, n: int, repetitions: int, oracle_max_n: int) -> ScalingRow:
        runs = [self._solve_once(circuit, n, k) for k in range(repetitions)]
        last = runs[-1]
        oracle_ms = None
        if n <= oracle_max_n:
            model = self.runner.build_model(n, self.r_ohm, self.seed, 0)
            drive = self.runner.default_drive(circuit, n, self.seed, 0)
            if circuit == "inv":
                drive = -np.asarray(drive)
            g_lambda = ideal_egv(model.g)[0] if circuit == "egv" else None
            start = time.perf_counter()
            run_oracle(circuit, model, drive, g_lambda=g_lambda, logger=self.logger)
            oracle_ms = (time.perf_counter() - start) * 1e3
        return ScalingRow(
            circuit=circuit,
            n=n,
            repetitions=repetitions,
            permc_spec=self.runner.settings.permc_spec,
            assembly_ms=float(np.median([d.assembly_ms for d in runs])),
            factor_ms=float(np.median([d.factor_ms for d in runs])),
            solve_ms=float(np.median([d.solve_ms for d in runs])),
            total_ms=float(np.median([d.total_ms for d in runs])),
            nnz=last.nnz,
            nnz_per_n2=last.nnz / float(n * n),
            sparsity=last.sparsity,
            peak_fill_in=max(d.fill_in for d in runs),
            fill_ratio=max(d.fill_in for d in runs) / float(max(last.nnz, 1)),
            oracle_ms=oracle_ms,
        )

    async def _measure_isolated(
        self,
        config: Dict[str, Any],
        circuit: str,
        n: int,
        repetitions: int,
        timeout: float,
        oracle_max_n: int
    ) -> ScalingRow:
        loop = asyncio.get_running_loop()
        receiver, sender = _MP_CONTEXT.Pipe(duplex=False)
        process = _MP_CONTEXT.Process(
            target=_measure_in_child,
            args=(sender, config, self.r_ohm, self.seed, circuit, n, repetitions, oracle_max_n),
            name=f"amc-sim-bench-{circuit}-{n}",
            daemon=True,
        )
        process.start()
        sender.close()
        reply = loop.run_in_executor(None, receiver.recv)
        try:
            status, payload = await asyncio.wait_for(asyncio.shield(reply), timeout=timeout)
        except asyncio.TimeoutError:
            self.logger.warning(f"{circuit} N={n} exceeded {timeout}s, terminated")
            process.terminate()
            status, payload = "timeout", None
        except EOFError:
            status, payload = "exited", None
        process.join()
        # the reader thread returns once the child's end of the pipe is gone
        with contextlib.suppress(EOFError, OSError):
            await reply
        receiver.close()

        if status == "ok":
            return ScalingRow(**payload)
        if status == "timeout":
            return ScalingRow(circuit=circuit, n=n, status="skipped", note=f"timeout after {timeout}s")
        if status == "exited":
            # no reply: killed by the OS (out of memory) or crashed in native code
            payload = f"worker exited with code {process.exitcode}"
        self.logger.error(f"{circuit} N={n}: {payload}")
        return ScalingRow(circuit=circuit, n=n, status="failed", note=payload)

    async def run_async(
        self,
        circuit: str,
        sizes: Sequence[int],
        repetitions: int = 3,
        timeout_per_size: float = 600,
        oracle_max_n: int = 64,
        orderings: Optional[Sequence[str]] = None,
        pilot_n: Optional[int] = None,
        on_row: Optional[Callable[[ScalingRow], None]] = None
    ) -> ScalingReport:
        """
        Measure each size in turn. After a timeout or a failed size every
        larger size is reported as skipped.

        Args:
            orderings: Candidate SuperLU column orderings; the one with the
                least fill at ``pilot_n`` is used for every size
            on_row: Called with each row as soon as it is known

        Raises:
            InputValidationError: sizes not strictly ascending (or below 2) or fewer than 3 repetitions
        """
        sizes = [int(n) for n in sizes]
        if not sizes or sizes[0] < 2:
            raise InputValidationError(f"Bench sizes must be >= 2, got {sizes}")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise InputValidationError(f"Bench sizes must be strictly ascending, got {sizes}")
        if repetitions < 3:
            raise InputValidationError(f"Bench needs at least 3 repetitions, got {repetitions}")

        bench_cfg = get_bench_config(self.config)
        if orderings is None:
            orderings = bench_cfg.get("orderings") or [self.runner.settings.permc_spec]
        if pilot_n is None:
            pilot_n = int(bench_cfg.get("pilot_n", 64))
        permc_spec, fill = self.choose_ordering(circuit, min(pilot_n, sizes[-1]), orderings)
        config = {**self.config, "solver": {**self.config.get("solver", {}), "permc_spec": permc_spec}}

        rows: List[ScalingRow] = []
        stopped: Optional[str] = None
        for n in sizes:
            if stopped is not None:
                row = ScalingRow(circuit=circuit, n=n, status="skipped", note=f"skipped after {stopped}")
            else:
                row = await self._measure_isolated(
                    config, circuit, n, repetitions, timeout_per_size, oracle_max_n
                )
                if row.status == "skipped":
                    stopped = f"timeout at N={n}"
                elif row.status == "failed":
                    stopped = f"failure at N={n}"
            self.logger.info(
                f"{circuit} N={n}: {row.status} total={row.total_ms} ms nnz/N^2={row.nnz_per_n2} "
                f"fill={row.peak_fill_in}"
            )
            rows.append(row)
            if on_row is not None:
                on_row(row)

        done = [r for r in rows if r.status == "ok"]
        slope = fit_loglog_slope([r.n for r in done], [r.total_ms for r in done])
        return ScalingReport(circuit=circuit, rows=rows, slope=slope, permc_spec=permc_spec,
                             pilot_fill=fill)

    def run(self, circuit: str, sizes: Sequence[int], **kwargs: Any) -> ScalingReport:
        return asyncio.run(self.run_async(circuit, sizes, **kwargs))
