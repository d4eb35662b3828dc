"""Lexicographic fidelity-then-probability objective."""

from ..models.herald import HeraldReport
from ..models.optimization import Objective, ObjectiveMode
from ..utils.config import Settings
from .base import BaseObjectiveStrategy


class FidelityFirstStrategy(BaseObjectiveStrategy):
    """Stage 0 maximizes F_NOON, stage 1 maximizes P_click at F_NOON = 1.

    Stage 1 adds ``penalty_weight * (1 - F)`` with no free zone, so the search
    is pulled back onto the unit-fidelity set.
    """

    def __init__(self, settings: Settings):
        self.fidelity_tolerance = settings.fidelity_tolerance
        self.penalty_weight = settings.penalty_weight

    def can_handle(self, objective: Objective) -> bool:
        return objective.mode == ObjectiveMode.FIDELITY_FIRST

    @property
    def stage_count(self) -> int:
        return 2

    def cost(self, objective: Objective, report: HeraldReport, stage: int) -> float:
        # An impossible herald counts as zero fidelity
        infidelity = 1.0 - (report.f_noon or 0.0)
        if stage == 0:
            return infidelity
        return -report.p_click + self.penalty_weight * infidelity

    def is_feasible(self, report: HeraldReport) -> bool:
        return (
            report.f_noon is not None
            and report.f_noon >= 1.0 - self.fidelity_tolerance
        )
