"""Concurrent parameter sweep over circuits, sizes, technology nodes and trials"""

import asyncio
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

from ..cli.models import BenchRecord
from ..core.exceptions import InputValidationError
from ..solvers import CIRCUITS
from ..workload.generators import preset
from .simulation import SimulationRunner


@dataclass(frozen=True)
class SweepCell:
    circuit: str
    n: int
    node: str
    trial: int

    @property
    def r_ohm(self) -> float:
        return preset(self.node).r_wire


def build_cells(
    circuits: Sequence[str],
    sizes: Sequence[int],
    presets: Sequence[str],
    trials: int
) -> List[SweepCell]:
    """
    Cross product in (circuit, n, node, trial) order.

    Raises:
        InputValidationError: unknown circuit or technology node, or a size below 2
    """
    unknown = [c for c in circuits if c not in CIRCUITS]
    if unknown:
        raise InputValidationError(f"Unknown circuits: {', '.join(unknown)}")
    for node in presets:
        preset(node)
    if any(int(n) < 2 for n in sizes):
        raise InputValidationError(f"Sweep sizes must be >= 2, got {list(sizes)}")
    return [
        SweepCell(circuit, int(n), node, trial)
        for circuit, n, node, trial in itertools.product(circuits, sizes, presets, range(trials))
    ]


class SweepRunner:
    """
    Runs sweep cells in a bounded worker pool.

    A failing or timed-out cell becomes a ``failed`` row; the sweep continues.
    Results keep the order of the input cells.
    """

    def __init__(
        self,
        config: Dict[str, Any],
        seed: int = 0,
        oracle: bool = False,
        max_concurrent: int = 4,
        timeout_per_cell: float = 600,
        logger: Optional[logging.Logger] = None
    ):
        self.seed = seed
        self.oracle = oracle
        self.max_concurrent = max(1, int(max_concurrent))
        self.timeout_per_cell = timeout_per_cell
        self.logger = logger or logging.getLogger(__name__)
        self.runner = SimulationRunner(config, self.logger)

    def run_cell(self, cell: SweepCell) -> BenchRecord:
        try:
            model = self.runner.build_model(cell.n, cell.r_ohm, self.seed, cell.trial)
            return self.runner.run_cell(
                cell.circuit,
                model,
                seed=self.seed,
                trial=cell.trial,
                node=cell.node,
                oracle=self.oracle,
            ).record
        except Exception as e:
            self.logger.error(f"Cell {cell} failed: {e}")
            return SimulationRunner.failure_record(
                cell.circuit, cell.n, cell.r_ohm, e, self.seed, cell.trial, cell.node
            )

    async def run_async(self, cells: Sequence[SweepCell]) -> List[BenchRecord]:
        semaphore = asyncio.Semaphore(self.max_concurrent)
        loop = asyncio.get_running_loop()

        with ThreadPoolExecutor(max_workers=self.max_concurrent) as executor:

            async def run_with_semaphore(cell: SweepCell) -> BenchRecord:
                async with semaphore:
                    try:
                        return await asyncio.wait_for(
                            loop.run_in_executor(executor, self.run_cell, cell),
                            timeout=self.timeout_per_cell,
                        )
                    except asyncio.TimeoutError as e:
                        self.logger.error(
                            f"Cell {cell} exceeded {self.timeout_per_cell}s, marked failed"
                        )
                        return SimulationRunner.failure_record(
                            cell.circuit, cell.n, cell.r_ohm,
                            TimeoutError(f"exceeded {self.timeout_per_cell}s"),
                            self.seed, cell.trial, cell.node,
                        )

            results = await asyncio.gather(*[run_with_semaphore(cell) for cell in cells])

        failed = sum(1 for r in results if r.status == "failed")
        self.logger.info(f"Sweep finished: {len(results)} cells, {failed} failed")
        return list(results)

    def run(self, cells: Sequence[SweepCell]) -> List[BenchRecord]:
        return asyncio.run(self.run_async(cells))
