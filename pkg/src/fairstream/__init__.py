"""Online fair allocation of indivisible items with adjustment accounting."""
from .core import (AdjustmentLedger, Allocation, ContiguousAllocation, IntervalValuationOracle, ValuationProfile,
                   count_adjustments, induce, run_online)
from .fairness import compare_leximin2, is_ef, is_ef1, is_propa, satisfies_eq1

__all__ = [
    "AdjustmentLedger", "Allocation", "ContiguousAllocation", "IntervalValuationOracle", "ValuationProfile",
    "count_adjustments", "induce", "run_online", "compare_leximin2", "is_ef", "is_ef1", "is_propa", "satisfies_eq1",
]
