import argparse
import logging

from src.model.circle_diffeo import CircleDiffeo
from src.model.frequency import Frequency
from src.strategy.run_strategy import RunStrategy
from src.tools.curves import CurvesTools

logger = logging.getLogger(__name__)


class ConstructStrategy(RunStrategy):
    """Build a twist map with a certified invariant curve from (alpha, phi) and save it"""

    command = "construct"
    action = "construct model"
    help = "construct a twist map with an analytic invariant curve"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--alpha", required=True, help="frequency: golden, sqrt2m1 or a decimal in (0, 1)")
        parser.add_argument("--phi", default="", help="harmonics of phi', e.g. c1=0.3,s2=0.05 (empty: identity)")
        parser.add_argument("--modes", type=int, help="Fourier modes per series")
        parser.add_argument("--grid", type=int, help="certification grid size (at least 4x modes)")
        parser.add_argument("--force", action="store_true", help="keep fits with large truncation tails")
        parser.add_argument("-o", "--output", default="model.json", help="model JSON file to write")

    def run(self, args: argparse.Namespace) -> int:
        modes = int(self.default(args, "modes", "modes"))
        grid = int(self.default(args, "grid", "grid"))
        frequency = Frequency.parse(args.alpha)
        phi = CircleDiffeo.from_harmonics(CircleDiffeo.parse_harmonics(args.phi), n_modes=modes)

        tolerances = self.manager.config["tolerances"]
        model = CurvesTools.construct_from_conjugacy(
            frequency, phi, n_modes=modes, grid=grid, force=args.force,
            tolerances={name: tolerances[name] for name in ("invariance", "mean_f", "g_consistency")},
        )
        digest = self.manager.save_model(model, args.output)

        rows = [(name, float(value)) for name, value in sorted(model.residuals.items())]
        rows.append(("strip_h0", float(model.strip_h0)))
        print(self.format_table(["quantity", "value"], rows))
        print(f"model written to {args.output} (sha256 {digest})")
        return 0
