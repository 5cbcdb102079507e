import argparse
import logging

from src.model.errors import InconclusiveDichotomy
from src.strategy.run_strategy import RunStrategy
from src.tools.cocycles import CocyclesTools

logger = logging.getLogger(__name__)

# Iterates used for the linear norm-growth fit
GROWTH_ITERATES = 10000


class CocycleStrategy(RunStrategy):
    """Lyapunov exponent, rotation number, norm growth and dichotomy of S_E^V"""

    command = "cocycle"
    action = "analyse cocycle"
    help = "analyse the Schrödinger cocycle of a model at one energy"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--model", required=True, help="model JSON file")
        parser.add_argument("--energy", type=float, default=0.0, help="energy E")
        parser.add_argument("--iters", type=int, help="iterations for the Lyapunov exponent and rotation number")
        parser.add_argument("--strip", type=float, default=0.0, help="imaginary phase offset delta")
        parser.add_argument("--phase", type=float, default=0.0, help="base phase phi0")
        parser.add_argument("-o", "--output", help="JSON file (default stdout)")

    def run(self, args: argparse.Namespace) -> int:
        model = self.load_model(args)
        iters = int(self.default(args, "iters", "iterations"))
        phases = int(self.manager.default("phases"))
        renorm = int(self.manager.default("renormalization"))
        uh_iters = int(self.manager.default("uh_iterations"))
        config = self.run_config(args, {
            "energy": args.energy, "iters": iters, "strip": args.strip, "phase": args.phase,
            "phases": phases, "renormalization": renorm, "uh_iterations": uh_iters,
        })

        cocycle = CocyclesTools.schrodinger_cocycle(model.V, args.energy, model.alpha, strip_h0=model.strip_h0)
        lyapunov = CocyclesTools.lyapunov_exponent(cocycle, iters, delta=args.strip, phases=phases,
                                                   renorm=renorm, phi0=args.phase)
        rotation = CocyclesTools.fibered_rotation_number(cocycle, iters, phases=phases, phi0=args.phase)
        iterates = CocyclesTools.cocycle_iterates(cocycle, min(iters, GROWTH_ITERATES), phi0=args.phase)
        try:
            dichotomy = CocyclesTools.uh_test(cocycle, uh_iters)
            uh, margin = dichotomy.hyperbolic, dichotomy.margin
        except InconclusiveDichotomy as e:
            logger.warning("[Cocycle] %s", e)
            uh, margin = "inconclusive", e.margin

        payload = {
            "lyapunov": lyapunov,
            "rotation": rotation,
            "sup_norm_growth_fit": CocyclesTools.sup_norm_growth_fit(iterates),
            "uh": uh,
            "margin": margin,
        }
        self.emit(self.render_json(config, payload), args.output)
        return 0
