"""
Coarse-to-fine search for the input bias that minimizes interconnect error.

The bias is applied as a ratio: INV scales the input currents b' = b(1 + r),
EGV the feedback conductance G_lambda' = lambda(1 + r), MVM the input
voltages v' = v(1 + r). Every candidate ratio is scored by the mean relative
error over the same set of randomized trials.
"""

import logging
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..core.exceptions import AmcSimError, BiasSearchError, InputValidationError
from ..core.model import CrossbarModel
from ..oracle.ideal import ideal_egv, ideal_inv, ideal_mvm
from ..solvers.base import SolverSettings
from ..solvers.egv_solver import FeedbackFamily
from ..solvers.inv_solver import InvSolver
from ..solvers.mvm_solver import MvmSolver
from ..workload.generators import MatrixSpec, gen_input, gen_matrix
from .metrics import delta_re, re_egv, re_inv

TRIAL_ERRORS = (AmcSimError, ArithmeticError, np.linalg.LinAlgError)


class BiasSearchConfig(BaseModel):
    """Grid, refinement and trial settings (``compensation`` config section)"""

    model_config = ConfigDict(frozen=True)

    initial_step: float = Field(0.02, gt=0)
    refinement_rounds: int = Field(3, gt=0)
    grid_points: int = Field(20, gt=0)
    grid_center_index: int = Field(15, gt=0)
    trials_per_candidate: int = Field(50, gt=0)
    seed: int = Field(0, ge=0)
    max_workers: int = Field(1, ge=1)
    v0: float = Field(0.1, allow_inf_nan=False)
    g_min: float = Field(1e-5, gt=0)
    g_max: float = Field(1e-4, gt=0)

    @model_validator(mode="after")
    def check_grid(self) -> "BiasSearchConfig":
        if self.grid_center_index >= self.grid_points:
            raise ValueError(
                f"grid_center_index ({self.grid_center_index}) must be below "
                f"grid_points ({self.grid_points})"
            )
        if self.v0 == 0:
            raise ValueError("v0 must be nonzero")
        return self


@dataclass(frozen=True)
class BiasSearchResult:
    circuit: str
    optimal_bias_ratio: float
    min_re: float
    baseline_re: float
    delta_re: float
    curve: List[Tuple[float, float]]
    rounds: List[Tuple[float, float]] = field(default_factory=list)


class _TrialSet(ABC):
    """Common random trials for one circuit; mean_re(ratio) is deterministic"""

    def __init__(self, model: CrossbarModel, cfg: BiasSearchConfig, settings: SolverSettings,
                 logger: logging.Logger):
        self.model = model
        self.cfg = cfg
        self.settings = settings
        self.logger = logger

    @abstractmethod
    def trial_error(self, j: int, ratio: float) -> float:
        """Relative error of trial j at this bias ratio"""

    def mean_re(self, ratio: float) -> float:
        errors = []
        for j in range(self.cfg.trials_per_candidate):
            try:
                errors.append(self.trial_error(j, ratio))
            except TRIAL_ERRORS as e:
                self.logger.warning(f"Skipping trial {j} at bias ratio {ratio:+.6g}: {e}")
        if not errors:
            raise BiasSearchError(f"All trials failed at bias ratio {ratio:+.6g}")
        return float(np.mean(errors))


class _InvTrials(_TrialSet):
    """Fixed matrix, fresh input currents per trial"""

    def __init__(self, *args):
        super().__init__(*args)
        self.solver = InvSolver(self.model, self.settings, self.logger)
        n, seed = self.model.n, self.cfg.seed
        self.inputs = [gen_input(n, "current", seed, (j,)) for j in range(self.cfg.trials_per_candidate)]
        self.ideal = [ideal_inv(self.model.g, b) for b in self.inputs]

    def trial_error(self, j: int, ratio: float) -> float:
        b = self.inputs[j] * (1.0 + ratio)
        return re_inv(self.solver.solve(-b).v_out, self.ideal[j])


class _MvmTrials(_TrialSet):
    """Fixed matrix, fresh input voltages per trial"""

    def __init__(self, *args):
        super().__init__(*args)
        self.solver = MvmSolver(self.model, self.settings, self.logger)
        n, seed = self.model.n, self.cfg.seed
        self.inputs = [gen_input(n, "voltage", seed, (j,)) for j in range(self.cfg.trials_per_candidate)]
        self.ideal = [ideal_mvm(self.model.g, v) for v in self.inputs]

    def trial_error(self, j: int, ratio: float) -> float:
        v = self.inputs[j] * (1.0 + ratio)
        return re_inv(self.solver.solve(v).i_out, self.ideal[j])


class _EgvTrials(_TrialSet):
    """Trial 0 uses the given matrix, later trials fresh DD-symmetric matrices"""

    def __init__(self, *args):
        super().__init__(*args)
        self.families: List[Optional[FeedbackFamily]] = []
        self.eigen: List[Optional[Tuple[float, np.ndarray]]] = []
        spec = MatrixSpec(
            n=self.model.n,
            kind="diag_dominant_symmetric",
            g_min=self.cfg.g_min,
            g_max=self.cfg.g_max,
            seed=self.cfg.seed,
            floor_policy="relax",
        )
        for j in range(self.cfg.trials_per_candidate):
            try:
                if j == 0:
                    trial_model = self.model
                else:
                    trial_model = CrossbarModel(
                        g=gen_matrix(spec, (j,)), g1=self.model.g1, g2=self.model.g2
                    )
                self.eigen.append(ideal_egv(trial_model.g))
                self.families.append(
                    FeedbackFamily(trial_model, self.cfg.v0, self.settings, self.logger)
                )
            except TRIAL_ERRORS as e:
                self.logger.warning(f"EGV trial {j} unusable: {e}")
                self.eigen.append(None)
                self.families.append(None)

    def trial_error(self, j: int, ratio: float) -> float:
        family, eigen = self.families[j], self.eigen[j]
        if family is None or eigen is None:
            raise BiasSearchError(f"EGV trial {j} was not set up")
        lam, x_ideal = eigen
        return re_egv(family.raw_readout(lam * (1.0 + ratio)), x_ideal)


_TRIALS = {"inv": _InvTrials, "egv": _EgvTrials, "mvm": _MvmTrials}


class _Evaluator:
    """Mean-RE cache keyed by the ratio rounded to 12 decimals"""

    def __init__(self, trials: _TrialSet, max_workers: int):
        self.trials = trials
        self.max_workers = max_workers
        self.scores: Dict[float, float] = {}

    def __call__(self, ratios: Sequence[float]) -> List[float]:
        keys = [round(r, 12) for r in ratios]
        pending = [k for k in dict.fromkeys(keys) if k not in self.scores]
        if self.max_workers > 1 and len(pending) > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                results = list(pool.map(self.trials.mean_re, pending))
        else:
            results = [self.trials.mean_re(k) for k in pending]
        self.scores.update(zip(pending, results))
        return [self.scores[k] for k in keys]

    def curve(self) -> List[Tuple[float, float]]:
        return sorted(self.scores.items())


def _trials_for(
    circuit: str,
    model: CrossbarModel,
    cfg: BiasSearchConfig,
    settings: Optional[SolverSettings],
    logger: logging.Logger
) -> _TrialSet:
    if circuit not in _TRIALS:
        raise InputValidationError(f"Unknown circuit '{circuit}'")
    return _TRIALS[circuit](model, cfg, settings or SolverSettings(), logger)


def search_optimal_bias(
    circuit: str,
    model: CrossbarModel,
    cfg: Optional[BiasSearchConfig] = None,
    settings: Optional[SolverSettings] = None,
    logger: Optional[logging.Logger] = None
) -> BiasSearchResult:
    """
    Coarse-to-fine grid search.

    Each round divides the step by 10 and scans
    offset + (i - center) * step for i in [0, grid_points); the best
    candidate becomes the next offset. Ratio 0 is scanned in the first round
    and is the baseline.

    Raises:
        BiasSearchError: every trial failed for some candidate
    """
    cfg = cfg or BiasSearchConfig()
    logger = logger or logging.getLogger(__name__)
    evaluate = _Evaluator(_trials_for(circuit, model, cfg, settings, logger), cfg.max_workers)

    offset = 0.0
    step = cfg.initial_step
    rounds = []
    for k in range(cfg.refinement_rounds):
        step /= 10.0
        candidates = [offset + (i - cfg.grid_center_index) * step for i in range(cfg.grid_points)]
        scores = evaluate(candidates)
        best_re, best_i = float("inf"), cfg.grid_center_index
        for i, re in enumerate(scores):
            if re < best_re:
                best_re, best_i = re, i
        offset = offset + (best_i - cfg.grid_center_index) * step
        rounds.append((step, offset))
        logger.info(
            f"{circuit} N={model.n} round {k + 1}: step={step:.2e} "
            f"best ratio={offset:+.6f} RE={best_re:.4e}"
        )

    baseline = evaluate([0.0])[0]
    minimum = evaluate([offset])[0]
    return BiasSearchResult(
        circuit=circuit,
        optimal_bias_ratio=offset,
        min_re=minimum,
        baseline_re=baseline,
        delta_re=delta_re(baseline, minimum),
        curve=evaluate.curve(),
        rounds=rounds,
    )


def bias_sweep(
    circuit: str,
    model: CrossbarModel,
    ratios: Sequence[float],
    cfg: Optional[BiasSearchConfig] = None,
    settings: Optional[SolverSettings] = None,
    logger: Optional[logging.Logger] = None
) -> List[Tuple[float, float]]:
    """Mean RE at each given bias ratio, same trials as search_optimal_bias"""
    cfg = cfg or BiasSearchConfig()
    logger = logger or logging.getLogger(__name__)
    evaluate = _Evaluator(_trials_for(circuit, model, cfg, settings, logger), cfg.max_workers)
    ratios = [float(r) for r in ratios]
    return list(zip(ratios, evaluate(ratios)))
