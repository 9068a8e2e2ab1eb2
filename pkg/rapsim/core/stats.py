"""
Matched paired t-test and the summary statistics reported by sweeps.
"""

import math
from typing import Sequence

import numpy as np
from scipy.special import betainc

from rapsim.models import TTestResult


def student_t_two_tailed(t: float, df: int) -> float:
    """Two-tailed p value of ``t`` under Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    if t == 0:
        return 1.0
    # P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2)
    return float(min(1.0, max(0.0, betainc(df / 2.0, 0.5, df / (df + t * t)))))


def paired_t_test(xs: Sequence[float], ys: Sequence[float]) -> TTestResult:
    """
    Paired t-test on ``xs - ys``.

    Zero spread with zero mean difference gives t = 0, p = 1; zero spread with
    a nonzero mean gives an infinite t and p = 0.
    """
    if len(xs) != len(ys):
        raise ValueError("paired samples must have equal length")
    n = len(xs)
    if n < 2:
        raise ValueError("paired t-test needs at least two pairs")

    d = np.asarray(xs, dtype=float) - np.asarray(ys, dtype=float)
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    df = n - 1

    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(t=0.0, df=df, p_two_tailed=1.0, mean_diff=0.0)
        return TTestResult(t=math.copysign(math.inf, mean), df=df, p_two_tailed=0.0, mean_diff=mean)

    t = mean / (sd / math.sqrt(n))
    return TTestResult(t=t, df=df, p_two_tailed=student_t_two_tailed(t, df), mean_diff=mean)


def mean_and_sd(values: Sequence[float]):
    """Arithmetic mean and sample standard deviation (0 for a single value)."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return 0.0, 0.0
    sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), sd
