import argparse

import numpy as np

from src.strategy.sweep_strategy import SweepStrategy

SPECTRUM_COLUMNS = ["E", "ids_counting", "ids_rotation", "lyapunov", "rotation", "uh"]


class SpectrumStrategy(SweepStrategy):
    """Spectral table over an energy grid: both IDS estimates, Lyapunov exponent, rotation number, dichotomy"""

    command = "spectrum"
    action = "compute spectrum"
    help = "tabulate the IDS and cocycle quantities of a model over an energy grid"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--model", required=True, help="model JSON file")
        parser.add_argument("--size", type=int, help="finite-section size for the counting IDS")
        parser.add_argument("--emin", type=float, default=-4.0, help="lowest energy")
        parser.add_argument("--emax", type=float, default=0.0, help="highest energy")
        parser.add_argument("--grid", type=int, default=21, help="number of energies")
        parser.add_argument("--iters", type=int, help="iterations for the Lyapunov exponent and rotation number")
        parser.add_argument("--phase", type=float, default=0.0, help="base phase phi0")
        parser.add_argument("-j", "--parallelism", type=int, help="worker processes")
        parser.add_argument("-o", "--output", help="CSV file (default stdout)")

    @staticmethod
    def energies(args: argparse.Namespace) -> np.ndarray:
        return np.linspace(args.emin, args.emax, max(int(args.grid), 1))

    def run(self, args: argparse.Namespace) -> int:
        return self.tabulate(args, SPECTRUM_COLUMNS)
