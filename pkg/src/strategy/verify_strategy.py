import argparse
import logging
import math
from typing import Callable, List, Tuple

from src.model.errors import AmspecError
from src.model.twist_model import TwistModel
from src.strategy.run_strategy import RunStrategy
from src.tools.cocycles import CocyclesTools
from src.tools.curves import CurvesTools
from src.tools.spectral import SpectralTools

logger = logging.getLogger(__name__)


class VerifyStrategy(RunStrategy):
    """Recompute every certified identity of a model file and compare with the tolerances"""

    command = "verify"
    action = "verify model"
    help = "print the residual table of a model with PASS/FAIL"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--model", required=True, help="model JSON file")
        parser.add_argument("--size", type=int, help="finite-section size for the nonpositivity check")
        parser.add_argument("-o", "--output", help="write the table to this file instead of stdout")

    @staticmethod
    def checks(model: TwistModel, size: int) -> List[Tuple[str, Callable[[], float]]]:
        reduction = {}

        def reduce():
            if "result" not in reduction:
                reduction["result"] = CocyclesTools.parabolic_reduce(model, tol=math.inf)
            return reduction["result"]

        return [
            ("invariance", lambda: CurvesTools.invariance_residual(model.f, model.gamma.mean, model.gamma.series,
                                                                   model.grid)),
            ("mean_f", lambda: abs(model.f.mean)),
            ("g_consistency", lambda: CurvesTools.induced_circle_map(model, tol=math.inf, force=True).disagreement),
            ("reduction", lambda: reduce().residual),
            ("z_form", lambda: reduce().z_form_residual),
            ("bloch", lambda: CocyclesTools.bloch_section_check(model)),
            ("potential", lambda: CocyclesTools.potential_identity_residual(model)),
            ("dual", lambda: SpectralTools.dual_eigencheck(model).relative_residual),
            ("nonpositivity", lambda: max(
                SpectralTools.section_operator(model.V, model.alpha, 0.0, size).top_eigenvalue(), 0.0)),
        ]

    def run(self, args: argparse.Namespace) -> int:
        model = self.load_model(args)
        size = int(self.default(args, "size", "section_size"))
        config = self.run_config(args, {"size": size})

        rows = []
        failed = 0
        for name, compute in self.checks(model, size):
            tolerance = self.manager.tolerance(name)
            try:
                residual = float(compute())
            except AmspecError as e:
                logger.warning("[Verify] Check %s could not be computed: %s", name, e)
                residual = math.inf
            passed = residual < tolerance
            failed += not passed
            rows.append((name, residual, tolerance, "PASS" if passed else "FAIL"))

        text = self.header_line(config) + "\n" + self.format_table(["check", "residual", "tolerance", "status"], rows) + "\n"
        self.emit(text, args.output)
        if failed:
            logger.info("[Verify] %d of %d checks failed", failed, len(rows))
            return 1
        return 0
