"""Monte-Carlo layer: seeded trials, one-shot classification, phase estimation.

Randomness contract.  Every stochastic routine in this package draws from a
``numpy.random.Generator`` over the PCG64 bit generator, seeded through
``numpy.random.SeedSequence`` with the caller's seed material.  Outcome
sequences are produced by a single vectorized ``rng.random(n) < p``
comparison, so a given (seed material, parameters) pair yields the same
byte-for-byte sequence on every platform numpy supports.  Replicated runs
give replica ``i`` the seed material ``(master_seed, i)``; the streams are
then mutually independent and individually reproducible.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ParameterError, SingularityError, UnidentifiableFunctionError
from .model import PiecewiseBinaryFunction, ProcedureParams
from .stats import (
    cosine_model_coefficients,
    delta_phi,
    fisher_phi,
    generator_moments,
    prob_x0_factorized,
)

_HALF_PI = math.pi / 2.0
_IDENTIFIABILITY_TOL = 1e-9
_AUDIT_TOL = 1e-3

SeedMaterial = int | tuple[int, ...]


class Outcome(Enum):
    X0 = "x0"
    NOT_X0 = "not_x0"


class FunctionClass(Enum):
    CONSTANT = "constant"
    BALANCED = "balanced"


@dataclass(frozen=True)
class TrialRecord:
    """One detection trial: what was measured, under what truth, from what seed."""

    outcome: Outcome
    true_phi: float
    f_descriptor: PiecewiseBinaryFunction
    seed: SeedMaterial


def _generator(seed: SeedMaterial) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _normalize_seed(seed: SeedMaterial) -> SeedMaterial:
    if isinstance(seed, tuple):
        return tuple(int(s) for s in seed)
    return int(seed)


def sample_outcomes(
    p: ProcedureParams,
    f: PiecewiseBinaryFunction,
    phi: float,
    n: int,
    seed: SeedMaterial,
) -> tuple[TrialRecord, ...]:
    """Draw n independent detection trials at phase phi under mask f.

    Each trial hits with the closed-form detection probability; the draw is
    ``rng.random(n) < p`` per the module-level randomness contract.  ``seed``
    is an integer, or a tuple of integers for derived streams such as
    (master_seed, replica_index).
    """
    n = int(n)
    if n < 1:
        raise ParameterError(f"need at least one trial, got n={n}")
    seed = _normalize_seed(seed)
    prob = prob_x0_factorized(p, f, phi).p_x0
    hits = _generator(seed).random(n) < prob
    return tuple(
        TrialRecord(Outcome.X0 if bool(h) else Outcome.NOT_X0, float(phi), f, seed)
        for h in hits
    )


def dj_classify(rec: TrialRecord) -> FunctionClass:
    """Single-shot decision: detection at the prepared point means constant.

    Valid only for trials run at phi = pi/2, where a balanced mask sends the
    detection probability to exactly zero.
    """
    if abs(rec.true_phi - _HALF_PI) > 1e-9:
        raise ParameterError(
            f"decision rule applies at phi = pi/2; record was taken at phi={rec.true_phi!r}"
        )
    return FunctionClass.CONSTANT if rec.outcome is Outcome.X0 else FunctionClass.BALANCED


@dataclass(frozen=True)
class EstimationReport:
    """Point estimate of the phase with its error and the information bound.

    empirical_mse is the squared error of this single estimate against the
    records' true phase; crb = 1/(n_shots * F(true_phi)), infinite when the
    Fisher information vanishes at the true phase.
    """

    phi_hat: float
    n_shots: int
    empirical_mse: float
    crb: float


def mle_phi(
    records: Iterable[TrialRecord], p: ProcedureParams, r: float
) -> EstimationReport:
    """Maximum-likelihood phase from a batch of trials of the step mask.

    The hit fraction estimates a + b*cos(2*phi); inverting (with clamping to
    the attainable range) maximizes the Bernoulli likelihood over the
    principal branch [0, pi/2].  The response is 2-periodic in 2*phi, so only
    that branch is identifiable from this measurement.
    """
    records = tuple(records)
    if not records:
        raise ParameterError("cannot estimate from an empty record batch")
    phi_true = records[0].true_phi
    if any(rec.true_phi != phi_true for rec in records):
        raise ParameterError("record batch mixes different true phases")
    a, b = cosine_model_coefficients(p, r)
    if b <= _IDENTIFIABILITY_TOL:
        raise UnidentifiableFunctionError(
            f"cosine amplitude {b:.3g} is below {_IDENTIFIABILITY_TOL:g}; "
            "a (near-)constant mask carries no phase information"
        )
    n = len(records)
    k = sum(1 for rec in records if rec.outcome is Outcome.X0)
    phi_hat = 0.5 * math.acos(min(1.0, max(-1.0, (k / n - a) / b)))
    fisher = fisher_phi(p, r, phi_true).fisher
    crb = 1.0 / (n * fisher) if fisher > 0.0 else math.inf
    return EstimationReport(
        phi_hat=phi_hat,
        n_shots=n,
        empirical_mse=(phi_hat - phi_true) ** 2,
        crb=crb,
    )


@dataclass(frozen=True)
class ReplicationSummary:
    """Replica-averaged estimation error next to the information bound."""

    reports: tuple[EstimationReport, ...]
    shots: int
    replicas: int
    phi_true: float
    mean_mse: float
    crb: float
    mse_over_crb: float


def replicated_mse(
    p: ProcedureParams,
    r: float,
    phi_true: float,
    shots: int,
    replicas: int,
    seed: int,
) -> ReplicationSummary:
    """Mean squared estimation error over independent replicas.

    Replica i samples its shots from the stream seeded with (seed, i); see
    the module docstring.  mse_over_crb is NaN when the bound is not finite.
    """
    shots = int(shots)
    replicas = int(replicas)
    if shots < 1 or replicas < 1:
        raise ParameterError(
            f"need shots >= 1 and replicas >= 1, got {shots}, {replicas}"
        )
    f = PiecewiseBinaryFunction.step(r, p.big_p)
    reports = []
    master = int(seed)
    for i in range(replicas):
        recs = sample_outcomes(p, f, phi_true, shots, (master, i))
        reports.append(mle_phi(recs, p, r))
    mean_mse = sum(rep.empirical_mse for rep in reports) / replicas
    crb = reports[0].crb
    ratio = mean_mse / crb if math.isfinite(crb) and crb > 0.0 else math.nan
    return ReplicationSummary(
        reports=tuple(reports),
        shots=shots,
        replicas=replicas,
        phi_true=float(phi_true),
        mean_mse=mean_mse,
        crb=crb,
        mse_over_crb=ratio,
    )


@dataclass(frozen=True)
class AuditRow:
    phi: float
    fisher: float
    variance_bound: float
    mean_bound_generator_f: float
    mean_bound_generator_2f: float
    dphi_sqrt_fisher: float
    optimal: bool


@dataclass(frozen=True)
class AuditReport:
    rows: tuple[AuditRow, ...]
    optimal_count: int


def heisenberg_audit(
    p: ProcedureParams, r: float, phis: Sequence[float] | None = None
) -> AuditReport:
    """Tabulate the Fisher information against its generator bounds over phi.

    variance_bound is 16*var(f), the convention-independent information cap
    (reading the mask exponent as f at doubled angle or as 2f at plain angle
    gives the same number).  The two mean-square columns, 4*mean^2 under each
    of those readings, are convention-dependent diagnostics only: never used
    as a cap.  dphi_sqrt_fisher multiplies the phase-propagation error of the
    threshold-at-zero reference procedure by sqrt(F) of the procedure under
    audit; a row is flagged optimal when that product is 1 within 1e-3.  The
    default grid leaves out the propagation singularities at multiples of
    pi/2.
    """
    if phis is None:
        phis = tuple(k * math.pi / 32.0 for k in range(1, 16))
    mom = generator_moments(p, r)
    variance_bound = 16.0 * mom.variance
    mean_sq = mom.mean * mom.mean
    rows = []
    for phi in phis:
        rep = fisher_phi(p, r, phi)
        try:
            product = delta_phi(p, phi) * math.sqrt(rep.fisher)
        except SingularityError:
            product = math.nan
        rows.append(
            AuditRow(
                phi=float(phi),
                fisher=rep.fisher,
                variance_bound=variance_bound,
                mean_bound_generator_f=4.0 * mean_sq,
                mean_bound_generator_2f=16.0 * mean_sq,
                dphi_sqrt_fisher=product,
                optimal=math.isfinite(product) and abs(product - 1.0) <= _AUDIT_TOL,
            )
        )
    return AuditReport(rows=tuple(rows), optimal_count=sum(r_.optimal for r_ in rows))
