"""Pure-Python reference for the compiled kernels in ``_ckernels.pyx``.

Both implementations must agree to the last bit on the same inputs; the
summation order (oldest example first) is part of the contract.
"""

import math

EXPONENTIAL = 0
LINEAR = 1
STEP = 2


def utility(kind, param, age):
    if kind == EXPONENTIAL:
        return math.exp(-param * age)
    if kind == LINEAR:
        return max(0.0, 1.0 - age / param)
    return 1.0 if age <= param else 0.0


def context_sum(times, tasks, start, stop, now, kind, param, weights):
    """Sum of utility(now - t) * weights[task] over examples ``start:stop``.

    Examples stamped after ``now`` are not yet available and are skipped.
    """
    total = 0.0
    for i in range(start, stop):
        t = times[i]
        if t > now:
            break
        w = weights[tasks[i]]
        if w == 0.0:
            continue
        total += utility(kind, param, now - t) * w
    return total
