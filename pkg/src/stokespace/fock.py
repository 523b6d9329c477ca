"""Two-mode Fock states, beam-splitter optics, and photon statistics.

States live on the truncated joint basis |n_a, n_b> with 0 <= n_a, n_b
<= cutoff.  A state is stored as a convex mixture of pure amplitude
grids; the dense density matrix is available through
:attr:`TwoModeState.rho` but never required by the numerical paths, so
diagonal-heavy states (squeezed vacuum, Fock states) stay cheap at
large cutoff.

A lossless four-port splitter is parametrized by (T, R) with
|T|^2 + |R|^2 = 1.  It maps coherent amplitudes (alpha, beta) to
(T alpha + R beta, T* beta - R* alpha) and acts block-diagonally on
each fixed total photon number.  The associated Stokes axis is
e = (2 Re(T R*), 2 Im(T R*), |T|^2 - |R|^2).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, ClassVar

import numpy as np
from scipy.special import gammaincc, gammaln

from .config import TOL, ConvergenceWarning, TruncationWarning

# rho above this dimension is refused; the factored paths stay usable.
_MAX_DENSE_DIM = 5000


def _powers(z, n: int) -> np.ndarray:
    """[z^0, z^1, ..., z^n] by cumulative products (keeps conj symmetry exact)."""
    out = np.empty(n + 1, dtype=complex)
    out[0] = 1.0
    if n:
        np.cumprod(np.full(n, z, dtype=complex), out=out[1:])
    return out


def _pascal_rows(nmax: int) -> list[np.ndarray]:
    rows = [np.array([1.0])]
    for _ in range(nmax):
        rows.append(np.convolve(rows[-1], [1.0, 1.0]))
    return rows


# ---------------------------------------------------------------------------
# state specs


@dataclass(frozen=True)
class VacuumSpec:
    kind: ClassVar[str] = "vacuum"


@dataclass(frozen=True)
class CoherentSpec:
    alpha: complex
    beta: complex
    kind: ClassVar[str] = "coherent"


@dataclass(frozen=True)
class HomInputSpec:
    """Single photon in each input port, |1,1>."""

    kind: ClassVar[str] = "hom_input"


@dataclass(frozen=True)
class TmsvSpec:
    """Two-mode squeezed vacuum with squeezing parameter xi >= 0."""

    xi: float
    kind: ClassVar[str] = "tmsv"

    def __post_init__(self):
        if self.xi < 0:
            raise ValueError("squeezing parameter must be >= 0")


@dataclass(frozen=True)
class MixtureSpec:
    """Statistical mixture of coherent states: ((weight, alpha, beta), ...)."""

    components: tuple[tuple[float, complex, complex], ...]
    kind: ClassVar[str] = "mixture"

    def __post_init__(self):
        if not self.components:
            raise ValueError("mixture needs at least one component")
        ws = np.array([w for w, _, _ in self.components], dtype=float)
        if np.any(ws < 0):
            raise ValueError("mixture weights must be >= 0")
        if abs(ws.sum() - 1.0) > 1e-12:
            raise ValueError("mixture weights must sum to 1")


StateSpec = VacuumSpec | CoherentSpec | HomInputSpec | TmsvSpec | MixtureSpec


def _complex_to_json(z: complex) -> dict:
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


def _complex_from_json(obj) -> complex:
    if isinstance(obj, dict):
        return complex(obj.get("re", 0.0), obj.get("im", 0.0))
    return complex(obj)


def spec_to_json(spec: StateSpec, cutoff: int | None = None) -> dict:
    """JSON-ready dict for a state spec, optionally embedding a cutoff."""
    if isinstance(spec, VacuumSpec):
        out = {"kind": "vacuum"}
    elif isinstance(spec, CoherentSpec):
        out = {
            "kind": "coherent",
            "alpha": _complex_to_json(spec.alpha),
            "beta": _complex_to_json(spec.beta),
        }
    elif isinstance(spec, HomInputSpec):
        out = {"kind": "hom_input"}
    elif isinstance(spec, TmsvSpec):
        out = {"kind": "tmsv", "xi": float(spec.xi)}
    elif isinstance(spec, MixtureSpec):
        out = {
            "kind": "mixture",
            "components": [
                {
                    "weight": float(w),
                    "alpha": _complex_to_json(a),
                    "beta": _complex_to_json(b),
                }
                for w, a, b in spec.components
            ],
        }
    else:
        raise ValueError(f"unknown state spec {spec!r}")
    if cutoff is not None:
        out["cutoff"] = int(cutoff)
    return out


def spec_from_json(obj) -> tuple[StateSpec, int | None]:
    """Parse a state spec dict (or JSON string).  Returns (spec, cutoff or None)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError("state spec must be an object with a 'kind' field")
    kind = obj["kind"]
    cutoff = obj.get("cutoff")
    if cutoff is not None:
        cutoff = int(cutoff)
    if kind == "vacuum":
        return VacuumSpec(), cutoff
    if kind == "coherent":
        return (
            CoherentSpec(
                _complex_from_json(obj["alpha"]), _complex_from_json(obj["beta"])
            ),
            cutoff,
        )
    if kind == "hom_input":
        return HomInputSpec(), cutoff
    if kind == "tmsv":
        return TmsvSpec(float(obj["xi"])), cutoff
    if kind == "mixture":
        comps = tuple(
            (
                float(c["weight"]),
                _complex_from_json(c["alpha"]),
                _complex_from_json(c["beta"]),
            )
            for c in obj["components"]
        )
        return MixtureSpec(comps), cutoff
    raise ValueError(f"unknown state kind {kind!r}")


# ---------------------------------------------------------------------------
# measurement direction


def _stokes_axis(T: complex, R: complex) -> np.ndarray:
    tr = T * np.conj(R)
    return np.array([2.0 * tr.real, 2.0 * tr.imag, abs(T) ** 2 - abs(R) ** 2])


@dataclass(frozen=True)
class MeasurementDirection:
    """Unit Stokes axis e together with the splitter (T, R) realizing it."""

    e: np.ndarray
    T: complex
    R: complex

    def __post_init__(self):
        e = np.asarray(self.e, dtype=float).reshape(3)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "T", complex(self.T))
        object.__setattr__(self, "R", complex(self.R))
        if abs(np.linalg.norm(e) - 1.0) > TOL.unit_vector:
            raise ValueError("direction axis must be a unit vector")
        if abs(abs(self.T) ** 2 + abs(self.R) ** 2 - 1.0) > TOL.unit_vector:
            raise ValueError("|T|^2 + |R|^2 must equal 1")
        if np.max(np.abs(_stokes_axis(self.T, self.R) - e)) > TOL.unit_vector:
            raise ValueError("(T, R) does not realize the stored axis e")


def direction_to_beamsplitter(e) -> MeasurementDirection:
    """Splitter parameters for a Stokes axis.

    Uses T = cos(theta/2), R = sin(theta/2) exp(-i phi) with e =
    (sin theta cos phi, sin theta sin phi, cos theta).  Inputs within
    1e-9 of unit norm are renormalized; at the poles phi is fixed to 0.
    """
    e = np.asarray(e, dtype=float).reshape(3)
    norm = np.linalg.norm(e)
    if norm == 0.0 or abs(norm - 1.0) > TOL.direction_input:
        raise ValueError("axis must be within 1e-9 of unit norm")
    e = e / norm
    theta = math.acos(min(1.0, max(-1.0, e[2])))
    phi = math.atan2(e[1], e[0])
    T = complex(math.cos(theta / 2.0))
    R = math.sin(theta / 2.0) * complex(math.cos(phi), -math.sin(phi))
    return MeasurementDirection(e=_stokes_axis(T, R), T=T, R=R)


def direction_from_tr(T: complex, R: complex) -> MeasurementDirection:
    """Direction for explicit splitter parameters (any phase convention)."""
    s = math.sqrt(abs(T) ** 2 + abs(R) ** 2)
    if abs(s - 1.0) > TOL.direction_input:
        raise ValueError("|T|^2 + |R|^2 must be within 1e-9 of 1")
    T, R = complex(T) / s, complex(R) / s
    return MeasurementDirection(e=_stokes_axis(T, R), T=T, R=R)


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True)
class TwoModeState:
    """Truncated two-mode state as a mixture of pure amplitude grids.

    components holds (weight, amp) pairs where amp[n_a, n_b] is the
    joint Fock amplitude of one pure component.  Amplitudes keep their
    exact truncated values (no renormalization), so trace(rho) equals
    1 - leakage up to rounding.  leakage estimates the probability mass
    lost to the cutoff.
    """

    cutoff: int
    components: tuple[tuple[float, np.ndarray], ...]
    leakage: float = 0.0

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError("cutoff must be >= 0")
        n = self.cutoff + 1
        comps = []
        for w, amp in self.components:
            amp = np.asarray(amp, dtype=complex)
            if amp.shape != (n, n):
                raise ValueError("component amplitude grid has wrong shape")
            if w < -1e-15:
                raise ValueError("component weights must be >= 0")
            comps.append((float(w), amp))
        object.__setattr__(self, "components", tuple(comps))
        if not (0.0 <= self.leakage <= 1.0 + 1e-12):
            raise ValueError("leakage must lie in [0, 1]")

    @property
    def dim(self) -> int:
        return (self.cutoff + 1) ** 2

    @cached_property
    def trace(self) -> float:
        return float(
            sum(w * np.sum(amp.real**2 + amp.imag**2) for w, amp in self.components)
        )

    @cached_property
    def rho(self) -> np.ndarray:
        """Dense density matrix on the joint basis, index n_a*(cutoff+1)+n_b."""
        if self.dim > _MAX_DENSE_DIM:
            raise ValueError(
                f"dense rho would be {self.dim}x{self.dim}; "
                "use the factored operations instead"
            )
        rho = np.zeros((self.dim, self.dim), dtype=complex)
        for w, amp in self.components:
            v = amp.reshape(-1)
            rho += w * np.outer(v, v.conj())
        return rho

    @classmethod
    def from_rho(
        cls, rho: np.ndarray, cutoff: int, leakage: float | None = None
    ) -> "TwoModeState":
        """Factor a dense density matrix into a mixture of pure grids."""
        n = cutoff + 1
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (n * n, n * n):
            raise ValueError("rho shape does not match the cutoff")
        if np.max(np.abs(rho - rho.conj().T)) > TOL.matrix_hermiticity:
            raise ValueError("rho must be Hermitian")
        w, v = np.linalg.eigh((rho + rho.conj().T) / 2.0)
        if w[0] < TOL.eigenvalue_floor:
            raise ValueError(f"rho has a negative eigenvalue {w[0]:.3e}")
        keep = w > 1e-14
        comps = tuple(
            (float(wi), v[:, i].reshape(n, n)) for i, wi in enumerate(w) if keep[i]
        )
        if leakage is None:
            leakage = max(0.0, 1.0 - float(np.real(np.trace(rho))))
        return cls(cutoff=cutoff, components=comps, leakage=leakage)


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """Truncated single-mode coherent amplitudes exp(-|a|^2/2) a^n / sqrt(n!)."""
    n = np.arange(cutoff + 1)
    mag = np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * gammaln(n + 1.0))
    return _powers(alpha, cutoff) * mag


def _coherent_leakage(alpha: complex, beta: complex, cutoff: int) -> float:
    # gammaincc(C+1, mu) is the Poisson CDF P(n <= C) at mean mu
    qa = gammaincc(cutoff + 1, abs(alpha) ** 2)
    qb = gammaincc(cutoff + 1, abs(beta) ** 2)
    return float(max(0.0, 1.0 - qa * qb))


def make_state(
    spec: StateSpec, cutoff: int, leakage_bound: float = TOL.leakage_bound
) -> TwoModeState:
    """Build the truncated state a StateSpec describes.

    Emits a TruncationWarning when the analytic leakage estimate exceeds
    leakage_bound (default 1e-10).
    """
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    n = cutoff + 1
    if isinstance(spec, VacuumSpec):
        amp = np.zeros((n, n), dtype=complex)
        amp[0, 0] = 1.0
        comps, leak = ((1.0, amp),), 0.0
    elif isinstance(spec, CoherentSpec):
        amp = np.outer(
            coherent_amplitudes(spec.alpha, cutoff),
            coherent_amplitudes(spec.beta, cutoff),
        )
        comps, leak = ((1.0, amp),), _coherent_leakage(spec.alpha, spec.beta, cutoff)
    elif isinstance(spec, HomInputSpec):
        if cutoff < 1:
            raise ValueError("hom_input needs cutoff >= 1")
        amp = np.zeros((n, n), dtype=complex)
        amp[1, 1] = 1.0
        comps, leak = ((1.0, amp),), 0.0
    elif isinstance(spec, TmsvSpec):
        kappa = math.tanh(spec.xi)
        amp = np.zeros((n, n), dtype=complex)
        diag = _powers(-kappa, cutoff) / math.cosh(spec.xi)
        amp[np.arange(n), np.arange(n)] = diag
        comps = ((1.0, amp),)
        leak = kappa ** (2 * (cutoff + 1)) if kappa > 0 else 0.0
    elif isinstance(spec, MixtureSpec):
        comps, leak = [], 0.0
        for w, a, b in spec.components:
            amp = np.outer(coherent_amplitudes(a, cutoff), coherent_amplitudes(b, cutoff))
            comps.append((w, amp))
            leak += w * _coherent_leakage(a, b, cutoff)
        comps = tuple(comps)
    else:
        raise ValueError(f"unknown state spec {spec!r}")
    if leak > leakage_bound:
        warnings.warn(
            f"cutoff {cutoff} leaves {leak:.3e} probability mass behind "
            f"(requested bound {leakage_bound:.1e})",
            TruncationWarning,
            stacklevel=2,
        )
    return TwoModeState(cutoff=cutoff, components=comps, leakage=leak)


def auto_cutoff(
    spec: StateSpec, bound: float = TOL.leakage_bound, max_cutoff: int = 512
) -> int:
    """Smallest cutoff whose analytic leakage estimate stays below bound."""
    if isinstance(spec, VacuumSpec):
        return 2
    if isinstance(spec, HomInputSpec):
        return 2
    if isinstance(spec, TmsvSpec):
        kappa = math.tanh(spec.xi)
        if kappa == 0.0:
            return 2
        # smallest c with kappa^(2 (c + 1)) < bound
        c = int(math.ceil(math.log(bound) / (2.0 * math.log(kappa)) - 1.0))
        return min(max(2, c), max_cutoff)
    if isinstance(spec, CoherentSpec):
        for c in range(2, max_cutoff + 1):
            if _coherent_leakage(spec.alpha, spec.beta, c) < bound:
                return c
        return max_cutoff
    if isinstance(spec, MixtureSpec):
        return max(
            auto_cutoff(CoherentSpec(a, b), bound, max_cutoff)
            for _, a, b in spec.components
        )
    raise ValueError(f"unknown state spec {spec!r}")


# ---------------------------------------------------------------------------
# beam splitter

def _splitter_columns(N, ks, pascal, powT, powR, powTc, powRm, half):
    """Columns <m, N-m|U|k, N-k> for the requested k values of one N block."""
    cols = np.empty((N + 1, len(ks)), dtype=complex)
    for idx, k in enumerate(ks):
        p = pascal[k] * powT[: k + 1] * powRm[k::-1]
        q = pascal[N - k] * powR[: N - k + 1] * powTc[N - k :: -1]
        cols[:, idx] = np.convolve(p, q) * np.exp(half - half[k])
    return cols


def _apply_splitter(amp: np.ndarray, T: complex, R: complex):
    """Exact block transform of one pure amplitude grid.

    Returns (new grid, clipped norm^2).  Blocks with total photon number
    above the cutoff extend past the square truncation; the amplitude
    that leaves the box is dropped and reported as clipped mass.
    """
    C = amp.shape[0] - 1
    n2 = 2 * C
    gl = gammaln(np.arange(n2 + 2) + 1.0)
    powT = _powers(T, n2)
    powR = _powers(R, n2)
    powTc = _powers(np.conj(T), n2)
    powRm = _powers(-np.conj(R), n2)
    pascal = _pascal_rows(n2)
    out = np.zeros_like(amp, dtype=complex)
    clipped = 0.0
    for N in range(n2 + 1):
        lo, hi = max(0, N - C), min(N, C)
        ks = np.arange(lo, hi + 1)
        vec = amp[ks, N - ks]
        nz = np.flatnonzero(vec)
        if nz.size == 0:
            continue
        half = 0.5 * (gl[: N + 1] + gl[N::-1])
        cols = _splitter_columns(N, ks[nz], pascal, powT, powR, powTc, powRm, half)
        res = cols @ vec[nz]
        out[ks, N - ks] = res[lo : hi + 1]
        if lo > 0:
            clipped += float(np.sum(res[:lo].real ** 2 + res[:lo].imag ** 2))
        if hi < N:
            clipped += float(
                np.sum(res[hi + 1 :].real ** 2 + res[hi + 1 :].imag ** 2)
            )
    return out, clipped


def beam_splitter(state: TwoModeState, T: complex, R: complex) -> TwoModeState:
    """Propagate a state through a lossless splitter with parameters (T, R).

    Exactly unitary on every total-photon-number block that fits the
    cutoff; blocks that spill past it lose the spilled mass to leakage.
    """
    if abs(abs(T) ** 2 + abs(R) ** 2 - 1.0) > TOL.splitter_unitarity:
        raise ValueError("|T|^2 + |R|^2 must equal 1 within 1e-10")
    comps = []
    clipped = 0.0
    for w, amp in state.components:
        if R == 0:
            # pure per-mode phases a -> T a, b -> T* b; nothing leaves the box
            n1 = amp.shape[0] - 1
            new_amp = amp * np.outer(_powers(T, n1), _powers(np.conj(T), n1))
            c = 0.0
        else:
            new_amp, c = _apply_splitter(amp, T, R)
        comps.append((w, new_amp))
        clipped += w * c
    return TwoModeState(
        cutoff=state.cutoff,
        components=tuple(comps),
        leakage=min(1.0, state.leakage + clipped),
    )


# ---------------------------------------------------------------------------
# photon statistics


@dataclass(frozen=True)
class JointPhotonDistribution:
    """Joint photon-number distribution behind a splitter.

    p[n_a, n_b] is the probability of counting (n_a, n_b) photons in the
    output modes selected by direction.  leakage is the estimated mass
    missing from the grid (source truncation plus splitter clipping).
    """

    p: np.ndarray
    direction: MeasurementDirection
    leakage: float = 0.0

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        object.__setattr__(self, "p", p)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError("p must be a square matrix")
        if p.min() < TOL.distribution_floor:
            raise ValueError(f"negative probability {p.min():.3e} in distribution")

    @property
    def cutoff(self) -> int:
        return self.p.shape[0] - 1


def joint_photon_distribution(
    state: TwoModeState, direction: MeasurementDirection
) -> JointPhotonDistribution:
    """Photon statistics of the splitter outputs along a Stokes axis."""
    rotated = beam_splitter(state, direction.T, direction.R)
    p = np.zeros((state.cutoff + 1, state.cutoff + 1))
    for w, amp in rotated.components:
        p += w * (amp.real**2 + amp.imag**2)
    return JointPhotonDistribution(p=p, direction=direction, leakage=rotated.leakage)


def _power_sum(p: np.ndarray, z_a: complex, z_b: complex) -> complex:
    c = p.shape[0] - 1
    va = _powers(z_a, c)
    vb = _powers(z_b, c)
    return complex(va @ (p @ vb))


def power_sum(dist: JointPhotonDistribution, z_a: complex, z_b: complex) -> complex:
    """<z_a^n_a z_b^n_b> over an already-computed joint distribution."""
    return _power_sum(dist.p, z_a, z_b)


def power_expectation(
    state: TwoModeState,
    direction: MeasurementDirection,
    z_a: complex,
    z_b: complex,
) -> complex:
    """Ordered moment <z_a^n_a z_b^n_b> of the output photon numbers.

    For |z| <= 1 the truncated sum converges unconditionally; outside
    that disc a ConvergenceWarning is attached when the state carries
    non-negligible truncated mass.
    """
    if (abs(z_a) > 1.0 + 1e-12 or abs(z_b) > 1.0 + 1e-12) and (
        state.leakage > TOL.convergence_leakage
    ):
        warnings.warn(
            "kernel lies beyond the guaranteed-existence region and the "
            f"state has leakage {state.leakage:.2e}; the truncated sum may "
            "be inaccurate",
            ConvergenceWarning,
            stacklevel=2,
        )
    dist = joint_photon_distribution(state, direction)
    return _power_sum(dist.p, z_a, z_b)


def factorial_moment(
    state: TwoModeState, direction: MeasurementDirection, p: int, q: int
) -> float:
    """Normally ordered moment <: n_a^p n_b^q :> of the output modes."""
    if p < 0 or q < 0:
        raise ValueError("moment orders must be >= 0")
    dist = joint_photon_distribution(state, direction)
    return distribution_factorial_moment(dist, p, q)


def _falling(n: np.ndarray, p: int) -> np.ndarray:
    out = np.ones_like(n, dtype=float)
    for i in range(p):
        out *= n - i
    return np.where(n >= p, out, 0.0)


def distribution_factorial_moment(
    dist: JointPhotonDistribution, p: int, q: int
) -> float:
    n = np.arange(dist.cutoff + 1)
    return float(_falling(n, p) @ (dist.p @ _falling(n, q)))


# ---------------------------------------------------------------------------
# Stokes vectors


@dataclass(frozen=True)
class StokesVector:
    """Mean Stokes vector S and total mean photon number S0 = <n_a + n_b>."""

    S: np.ndarray
    S0: float

    def __post_init__(self):
        object.__setattr__(self, "S", np.asarray(self.S, dtype=float).reshape(3))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.S))


def coherent_stokes(alpha: complex, beta: complex) -> StokesVector:
    """Stokes vector of a coherent pair; here ||S|| = |alpha|^2 + |beta|^2."""
    ab = np.conj(alpha) * beta
    return StokesVector(
        S=np.array([2.0 * ab.real, 2.0 * ab.imag, abs(alpha) ** 2 - abs(beta) ** 2]),
        S0=abs(alpha) ** 2 + abs(beta) ** 2,
    )


def stokes_mean(state: TwoModeState) -> StokesVector:
    """Mean Stokes vector of the input modes (no splitter applied)."""
    c = state.cutoff
    n = np.arange(c + 1, dtype=float)
    cross_w = np.sqrt(np.outer(n[1:], n[1:]))  # sqrt(n_a (n_b+1)) grid, shifted
    sx = 0.0
    sy = 0.0
    na_mean = 0.0
    nb_mean = 0.0
    for w, amp in state.components:
        prob = amp.real**2 + amp.imag**2
        na_mean += w * float(n @ prob.sum(axis=1))
        nb_mean += w * float(prob.sum(axis=0) @ n)
        # <a^dag b> couples amp[n_a, n_b] with amp[n_a - 1, n_b + 1]
        ab = np.sum(np.conj(amp[1:, :-1]) * cross_w * amp[:-1, 1:])
        sx += w * 2.0 * ab.real
        sy += w * 2.0 * ab.imag
    return StokesVector(
        S=np.array([sx, sy, na_mean - nb_mean]), S0=na_mean + nb_mean
    )
