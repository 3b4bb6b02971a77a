# File: s3rec/src/services/dataio/metrics.py
import numpy as np

from ...utils.error_handling import ShapeError, UsageError


def rmse(pred, truth) -> float:
    """Root mean squared error between two equal-length sequences

    Raises:
        UsageError: For empty input
        ShapeError: For unequal lengths
    """
    pred = np.asarray(pred, dtype=np.float64).reshape(-1)
    truth = np.asarray(truth, dtype=np.float64).reshape(-1)
    if pred.size == 0 or truth.size == 0:
        raise UsageError("RMSE of an empty sequence is undefined")
    if pred.shape != truth.shape:
        raise ShapeError(f"RMSE needs equal lengths, got {pred.size} and {truth.size}")
    return float(np.sqrt(np.mean((pred - truth) ** 2)))
