"""Shared parameter builders for the test suite."""

import math

from cvphase import ProcedureParams, aligned_half_width

DELTA = 1.0 / math.sqrt(2.0)
BIG_P = 3.0 / (2.0 * DELTA)  # mask product P*delta = 1.5
GRID_N = 4096


def canonical(n: int = GRID_N) -> ProcedureParams:
    """The standard working point: delta = 1/sqrt(2), P = 3/(2*delta), x0 = 0,
    T aligned so conjugate cell edges hit multiples of P/8."""
    return ProcedureParams(
        x0=0.0,
        delta=DELTA,
        big_t=aligned_half_width(BIG_P, n),
        big_p=BIG_P,
    )


def with_mask_product(product: float, delta: float = DELTA) -> ProcedureParams:
    """Parameters with a chosen P*delta, T comfortably inside the regime."""
    big_p = product / delta
    return ProcedureParams(
        x0=0.0, delta=delta, big_t=8.0 * delta, big_p=big_p
    )


def saturated() -> ProcedureParams:
    """Mask product large enough that erf(2*P*delta) rounds to 1.0 exactly."""
    p = ProcedureParams(x0=0.0, delta=1.0, big_t=10.0, big_p=4.0)
    assert math.erf(2.0 * p.big_p * p.delta) == 1.0
    return p
