"""Nonclassicality criteria built on the Stokes-space generating function.

For any classical (convex coherent) state the matrix with entries
M(t_p* + t_q; tau_p + tau_q) over a shared axis is positive
semidefinite; a negative eigenvalue or a negative principal minor is a
direct witness of quantum correlations in the phase-averaged photon
statistics.  The same machinery yields characteristic-function,
variance, cross-correlation, and Cauchy-Schwarz style tests.

A criterion reports verdict "nonclassical" only when its value falls
below -tolerance; everything else is "inconclusive" (classicality is
never certified).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .config import TOL
from .fock import (
    JointPhotonDistribution,
    MeasurementDirection,
    TwoModeState,
    distribution_factorial_moment,
    joint_photon_distribution,
)
from .mgf import mgf_from_distribution, char_fn

NONCLASSICAL = "nonclassical"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class MgfMatrixSpec:
    """Evaluation points (t_p, tau_p) sharing one measurement axis."""

    direction: MeasurementDirection
    points: tuple[tuple[complex, float], ...]

    def __post_init__(self):
        if not self.points:
            raise ValueError("need at least one (t, tau) point")
        pts = tuple((complex(t), float(tau)) for t, tau in self.points)
        object.__setattr__(self, "points", pts)
        if any(tau < 0 for _, tau in pts):
            raise ValueError("tau values must be >= 0")


@dataclass(frozen=True)
class CriterionReport:
    """Outcome of one nonclassicality test."""

    value: float
    verdict: str
    tolerance: float
    witness: np.ndarray | None = None


def _verdict(value: float, tolerance: float) -> str:
    return NONCLASSICAL if value < -tolerance else INCONCLUSIVE


def mgf_matrix(state: TwoModeState, spec: MgfMatrixSpec) -> np.ndarray:
    """Hermitian matrix M[p, q] = M(t_p* + t_q; tau_p + tau_q)."""
    dist = joint_photon_distribution(state, spec.direction)
    m = len(spec.points)
    out = np.empty((m, m), dtype=complex)
    for p, (tp, taup) in enumerate(spec.points):
        for q, (tq, tauq) in enumerate(spec.points):
            out[p, q] = mgf_from_distribution(dist, np.conj(tp) + tq, taup + tauq)
    return out


def matrix_verdict(
    matrix: np.ndarray, tolerance: float = TOL.verdict
) -> CriterionReport:
    """Minimum eigenvalue test of a Hermitian moment matrix.

    The witness is the eigenvector of the smallest eigenvalue; classical
    states keep all eigenvalues >= -tolerance.
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("matrix must be square")
    if np.max(np.abs(matrix - matrix.conj().T)) > TOL.matrix_hermiticity:
        raise ValueError("matrix is not Hermitian within 1e-8")
    w, v = np.linalg.eigh((matrix + matrix.conj().T) / 2.0)
    return CriterionReport(
        value=float(w[0]),
        verdict=_verdict(float(w[0]), tolerance),
        tolerance=tolerance,
        witness=v[:, 0],
    )


def _second_order_entries(
    dist: JointPhotonDistribution,
    t: complex,
    tau: float,
    t2: complex,
    tau2: float,
):
    m11 = mgf_from_distribution(dist, 2.0 * complex(t).real, 2.0 * tau).real
    m22 = mgf_from_distribution(dist, 2.0 * complex(t2).real, 2.0 * tau2).real
    m12 = mgf_from_distribution(dist, np.conj(t) + t2, tau + tau2)
    return m11, m22, m12


def second_order_det(
    state: TwoModeState,
    direction: MeasurementDirection,
    t: complex,
    tau: float,
    t2: complex,
    tau2: float,
) -> float:
    """Determinant of the 2x2 moment matrix on points {(t,tau), (t2,tau2)}.

    Negative values witness nonclassicality; for classical states the
    Cauchy-Schwarz inequality keeps it >= 0.
    """
    dist = joint_photon_distribution(state, direction)
    m11, m22, m12 = _second_order_entries(dist, t, tau, t2, tau2)
    return float(m11 * m22 - (m12.real**2 + m12.imag**2))


def cauchy_schwarz_violation(
    state: TwoModeState,
    direction: MeasurementDirection,
    point: tuple[complex, float],
    point2: tuple[complex, float],
) -> float:
    """|<: A^dag B :>|^2 - <: A^dag A :><: B^dag B :> for damping kernels.

    A and B are the normally ordered exponentials at the two points; a
    positive value violates the classical Cauchy-Schwarz bound and
    equals -(second_order_det) identically.  The second point must not
    be the trivial (0, 0) kernel (A alone gives no inequality).
    """
    t, tau = point
    t2, tau2 = point2
    if t2 == 0 and tau2 == 0:
        raise ValueError("the second point must differ from (0, 0)")
    dist = joint_photon_distribution(state, direction)
    m11, m22, m12 = _second_order_entries(dist, t, tau, t2, tau2)
    return float((m12.real**2 + m12.imag**2) - m11 * m22)


def char_fn_criterion(
    state: TwoModeState, k, tolerance: float = TOL.verdict
) -> CriterionReport:
    """Classical characteristic functions obey |Phi(k)| <= 1.

    value = 1 - |Phi(k)|; a negative value is a nonclassicality witness.
    """
    value = 1.0 - abs(char_fn(state, k))
    return CriterionReport(
        value=value, verdict=_verdict(value, tolerance), tolerance=tolerance
    )


class VarianceReport(NamedTuple):
    var_stokes: float  # <: (Delta e.S)^2 :>
    var_number: float  # <: (Delta N)^2 :>


def variance_criteria(
    state: TwoModeState, direction: MeasurementDirection
) -> VarianceReport:
    """Normally ordered variances of e.S and of the total photon number.

    Negative values certify sub-shot-noise statistics (for the total
    number this matches a negative Mandel-type parameter).  Classical
    states keep both >= 0; coherent states sit exactly at 0.
    """
    dist = joint_photon_distribution(state, direction)
    f10 = distribution_factorial_moment(dist, 1, 0)
    f01 = distribution_factorial_moment(dist, 0, 1)
    f20 = distribution_factorial_moment(dist, 2, 0)
    f02 = distribution_factorial_moment(dist, 0, 2)
    f11 = distribution_factorial_moment(dist, 1, 1)
    var_n = f20 + 2.0 * f11 + f02 - (f10 + f01) ** 2
    var_s = f20 - 2.0 * f11 + f02 - (f10 - f01) ** 2
    return VarianceReport(var_stokes=float(var_s), var_number=float(var_n))


class CrossCorrelationReport(NamedTuple):
    number_stokes: float  # det of the (N, e.S) normally ordered covariance
    photon_photon: float  # det of the (n_a, n_b) normally ordered covariance


def cross_correlation_det(
    state: TwoModeState, direction: MeasurementDirection
) -> CrossCorrelationReport:
    """Determinants of two normally ordered covariance matrices.

    number_stokes pairs the total photon number with e.S; photon_photon
    pairs the two output photon numbers.  Classical states keep both
    determinants >= 0.
    """
    dist = joint_photon_distribution(state, direction)
    f10 = distribution_factorial_moment(dist, 1, 0)
    f01 = distribution_factorial_moment(dist, 0, 1)
    f20 = distribution_factorial_moment(dist, 2, 0)
    f02 = distribution_factorial_moment(dist, 0, 2)
    f11 = distribution_factorial_moment(dist, 1, 1)
    var_n = f20 + 2.0 * f11 + f02 - (f10 + f01) ** 2
    var_s = f20 - 2.0 * f11 + f02 - (f10 - f01) ** 2
    cov_ns = f20 - f02 - (f10 + f01) * (f10 - f01)
    var_a = f20 - f10**2
    var_b = f02 - f01**2
    cov_ab = f11 - f10 * f01
    return CrossCorrelationReport(
        number_stokes=float(var_n * var_s - cov_ns**2),
        photon_photon=float(var_a * var_b - cov_ab**2),
    )
