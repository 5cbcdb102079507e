import argparse
import json
import logging

import numpy as np

from src.model.errors import InvalidArgument
from src.model.twist_model import PeriodicOrbitSpec
from src.strategy.run_strategy import RunStrategy
from src.tools.aubry import AubryTools
from src.tools.twist import TwistTools

logger = logging.getLogger(__name__)


class MinimizeStrategy(RunStrategy):
    """Periodic action minimizer with rotation number p/q for a model's f or the standard map"""

    command = "minimize"
    action = "minimize action"
    help = "find a p/q action-minimizing periodic configuration"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--model", help="model JSON file providing f")
        source.add_argument("--standard", type=float, metavar="LAMBDA",
                            help="use the standard map f = LAMBDA sin(2 pi x)/(2 pi)")
        parser.add_argument("--p", type=int, required=True, help="rotation number numerator")
        parser.add_argument("--q", type=int, required=True, help="rotation number denominator")
        parser.add_argument("--a", type=float, help="drift of the generating function (default p/q)")
        parser.add_argument("-o", "--output", help="CSV file (default stdout)")

    def run(self, args: argparse.Namespace) -> int:
        if args.model:
            f = self.load_model(args).f
        else:
            f = TwistTools.standard_map(args.standard)
        if args.q < 1:
            raise InvalidArgument(f"Period q must be positive, got {args.q}")
        spec = PeriodicOrbitSpec(args.p, args.q, args.a if args.a is not None else args.p / args.q)
        config = self.run_config(args, {"p": spec.p, "q": spec.q, "a": spec.a, "standard": args.standard})

        c = AubryTools.minimize_periodic(f, spec, tol=self.manager.tolerance("residual"),
                                         slack=self.manager.tolerance("nonpositivity"))
        cell = np.asarray(c.points[:spec.q])
        residual = AubryTools.periodic_residual(f, cell, spec.p)
        previous = np.roll(cell, 1)
        previous[0] -= spec.p
        rows = [(n, float(cell[n]), float(cell[n] - previous[n]), float(residual[n])) for n in range(spec.q)]

        summary = {
            "action": AubryTools.periodic_action(f, spec, cell),
            "top_eigenvalue": AubryTools.periodic_top_eigenvalue(f, spec, cell),
            "converged": True,
        }
        text = self.render_csv(config, ["n", "x", "r", "residual"], rows)
        text += "# summary " + json.dumps(summary, sort_keys=True) + "\n"
        self.emit(text, args.output)
        return 0
