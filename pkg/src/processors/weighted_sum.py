"""Weighted fidelity/probability objective."""

from ..models.herald import HeraldReport
from ..models.optimization import Objective, ObjectiveMode
from .base import BaseObjectiveStrategy


class WeightedSumStrategy(BaseObjectiveStrategy):
    """Maximize ``weight * F + (1 - weight) * P`` in a single stage."""

    def can_handle(self, objective: Objective) -> bool:
        return objective.mode == ObjectiveMode.WEIGHTED_SUM

    @property
    def stage_count(self) -> int:
        return 1

    def cost(self, objective: Objective, report: HeraldReport, stage: int) -> float:
        fidelity = report.f_noon or 0.0
        return -(objective.weight * fidelity + (1.0 - objective.weight) * report.p_click)
