"""Numerical tolerances used by validity checks across the package.

All checks use absolute tolerances.  The defaults below are the single
source of truth; functions that validate operators take an optional
``tol`` override but default to these values.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Absolute tolerances for operator and distribution validity checks."""

    #: Euclidean-norm deviation allowed for pure states.
    norm: float = 1e-10
    #: max-entry deviation from Hermiticity.
    herm: float = 1e-10
    #: most negative admissible eigenvalue of a density operator.
    density_psd: float = 1e-10
    #: deviation of a density-operator trace from 1.
    trace: float = 1e-10
    #: max-entry deviation of U U-dagger from the identity.
    unitary: float = 1e-9
    #: max-entry deviation of P @ P from P for projectors.
    idempotent: float = 1e-9
    #: max-entry deviation of POVM / Kraus completeness sums from identity.
    completeness: float = 1e-9
    #: most negative admissible eigenvalue of a POVM effect.
    effect_psd: float = 1e-9
    #: max-entry bound on rho @ sigma for orthogonal-support pairs.
    orthogonal: float = 1e-9
    #: Hermitian eigendecomposition reconstruction error bound.
    reconstruction: float = 1e-9
    #: deviation of probability vectors from summing to 1.
    prob_sum: float = 1e-12
    #: eigenvalue cutoff below which pseudo-inverses treat a mode as zero.
    support_cutoff: float = 1e-10


TOL = Tolerances()
