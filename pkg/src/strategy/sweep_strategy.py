import argparse
import logging
import os
from multiprocessing import Pool
from typing import Any, Dict, Iterator, List, Optional, Sequence

import numpy as np

from src.model.errors import InconclusiveDichotomy, IterateOverflow
from src.model.twist_model import TwistModel
from src.strategy.ids_strategy import CountingIdsStrategy
from src.strategy.run_strategy import RunStrategy
from src.tools.cocycles import CocyclesTools
from src.tools.spectral import SpectralTools

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["E", "lyapunov", "rotation", "ids_counting", "ids_rotation", "uh", "margin", "measure_factor"]

# Per-process state set by the pool initializer
_worker_state: Dict[str, Any] = {}


def _init_worker(model: TwistModel, options: Dict[str, Any]) -> None:
    _worker_state["model"] = model
    _worker_state["options"] = options
    _worker_state["counting"] = CountingIdsStrategy(model.V, model.alpha, options["phase"], size=options["size"])


def energy_row(E: float) -> Dict[str, Any]:
    """Every per-energy quantity of the sweep and spectrum tables"""
    model: TwistModel = _worker_state["model"]
    options = _worker_state["options"]
    cocycle = CocyclesTools.schrodinger_cocycle(model.V, E, model.alpha, strip_h0=model.strip_h0)
    rho = CocyclesTools.fibered_rotation_number(cocycle, options["iters"], phases=options["phases"],
                                                phi0=options["phase"])
    try:
        dichotomy = CocyclesTools.uh_test(cocycle, options["uh_iterations"])
        uh, margin = ("true" if dichotomy.hyperbolic else "false"), dichotomy.margin
    except InconclusiveDichotomy as e:
        uh, margin = "inconclusive", e.margin
    try:
        factor: Any = SpectralTools.measure_factor(cocycle, options["epsilon"])
    except IterateOverflow:
        factor = "overflow"
    return {
        "E": float(E),
        "lyapunov": CocyclesTools.lyapunov_exponent(cocycle, options["iters"], phases=options["phases"],
                                                    renorm=options["renormalization"], phi0=options["phase"]),
        "rotation": rho,
        "ids_counting": _worker_state["counting"].estimate(E),
        "ids_rotation": float(min(max(1.0 - 2.0 * rho, 0.0), 1.0)),
        "uh": uh,
        "margin": margin,
        "measure_factor": factor,
    }


def evaluate_energies(model: TwistModel, options: Dict[str, Any], energies: Sequence[float],
                      workers: int) -> Iterator[Dict[str, Any]]:
    """Rows in energy order; with several workers the grid is split over a process pool"""
    if workers <= 1:
        _init_worker(model, options)
        for E in energies:
            yield energy_row(E)
        return
    with Pool(processes=workers, initializer=_init_worker, initargs=(model, options)) as pool:
        yield from pool.imap(energy_row, list(energies), chunksize=1)


def effective_workers(requested: Optional[int], configured: int) -> int:
    """AMSPEC_WORKERS wins over the flag, the flag over the configuration file"""
    env = os.getenv("AMSPEC_WORKERS")
    if env:
        return max(int(env), 1)
    return max(int(requested if requested is not None else configured), 1)


class SweepStrategy(RunStrategy):
    """Energy sweep of Lyapunov exponent, rotation number, IDS, dichotomy and the spectral-measure factor"""

    command = "sweep"
    action = "run sweep"
    help = "tabulate cocycle and spectral quantities over an energy grid"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--model", required=True, help="model JSON file")
        parser.add_argument("--emin", type=float, required=True, help="lowest energy")
        parser.add_argument("--emax", type=float, required=True, help="highest energy")
        parser.add_argument("--points", type=int, default=101, help="number of energies")
        parser.add_argument("--iters", type=int, help="iterations for the Lyapunov exponent and rotation number")
        parser.add_argument("--size", type=int, help="finite-section size for the counting IDS")
        parser.add_argument("--epsilon", type=float, help="radius for the spectral-measure factor")
        parser.add_argument("--phase", type=float, default=0.0, help="base phase phi0")
        parser.add_argument("-j", "--parallelism", type=int, help="worker processes")
        parser.add_argument("-o", "--output", help="CSV file (default stdout)")

    def options(self, args: argparse.Namespace) -> Dict[str, Any]:
        return {
            "iters": int(self.default(args, "iters", "iterations")),
            "size": int(self.default(args, "size", "section_size")),
            "epsilon": float(self.default(args, "epsilon", "epsilon")),
            "phase": float(args.phase),
            "phases": int(self.manager.default("phases")),
            "renormalization": int(self.manager.default("renormalization")),
            "uh_iterations": int(self.manager.default("uh_iterations")),
        }

    @staticmethod
    def energies(args: argparse.Namespace) -> np.ndarray:
        return np.linspace(args.emin, args.emax, max(int(args.points), 1))

    def tabulate(self, args: argparse.Namespace, columns: List[str]) -> int:
        model = self.load_model(args)
        options = self.options(args)
        workers = effective_workers(getattr(args, "parallelism", None), self.manager.config["parallelism"])
        energies = self.energies(args)
        config = self.run_config(args, dict(options, emin=args.emin, emax=args.emax, points=len(energies),
                                            columns=",".join(columns)))
        logger.info("[Sweep] %d energies on %d worker(s)", len(energies), workers)

        rows: List[List[Any]] = []
        truncated = False
        try:
            for row in evaluate_energies(model, options, energies, workers):
                rows.append([row[name] for name in columns])
        except KeyboardInterrupt:
            logger.warning("[Sweep] Interrupted after %d of %d energies; writing partial table", len(rows), len(energies))
            truncated = True
        self.emit(self.render_csv(config, columns, rows, truncated=truncated), args.output)
        return 1 if truncated else 0

    def run(self, args: argparse.Namespace) -> int:
        return self.tabulate(args, SWEEP_COLUMNS)
