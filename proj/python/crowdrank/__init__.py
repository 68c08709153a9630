"""Worker skill estimation and label inference for crowdsourced labels.

Observations are three equal-length integer arrays: worker index, task index
and class index. Binary labels use class 0 for +1 and class 1 for -1.
"""

from ._crowdrank import (
    CrowdrankError,
    DataError,
    NotIdentifiableError,
    NumericalError,
    ParameterError,
    check,
    committee_potential,
    estimate,
    majority_vote,
    predict,
    synth,
)

__all__ = [
    "CrowdrankError",
    "DataError",
    "NotIdentifiableError",
    "NumericalError",
    "ParameterError",
    "check",
    "committee_potential",
    "estimate",
    "majority_vote",
    "predict",
    "synth",
]
