"""Large-time behaviour: decay rates, ground-state limits, positivity.

The quantities of interest all have spectral expansions

    <f, e^{-tL} g>_m = sum_i w_i e^{-t E_i},      w_i = <phi_i, f>_m <phi_i, g>_m,
    p_t(x, y)        = sum_i phi_i(x) phi_i(y) e^{-t E_i},

and every estimator here works on the log of such sums (log-sum-exp over
the atoms), so arbitrarily large grid times cost nothing and never
underflow.  The headline limits realized below:

* -log <f, e^{-tL} g> / t converges to the bottom of the joint spectral
  support; for positive f, g on a connected graph that bottom is E0.
* e^{t E0} p_t(x, y) converges to Phi(x) Phi(y) with Phi the normalized
  positive ground state, at rate e^{-(E1 - E0) t}.
* e^{-tL} is entrywise positive for some (all) t > 0 exactly when the
  graph is connected.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import (
    InvariantViolation,
    NonPositivePairing,
    NoSpectralGap,
    PositivityConnectivityMismatch,
    ValidationError,
    ZeroKernelEntry,
)
from .graphs import is_connected
from .operators import (
    OperatorRep,
    SpectralData,
    coefficients,
    eigendecompose,
)
from .semigroup import SCALING_SQUARING, heat_kernel, pade13_expm, resolvent

__all__ = [
    "TimeGrid",
    "RateEstimate",
    "GroundStateProfile",
    "rate_inner",
    "rate_kernel",
    "groundstate_limit",
    "eigenvalue_detector",
    "strong_convergence_check",
    "positivity_improving",
]

# relative mass below which an atom does not count as spectral support
_SUPPORT_TOL = 1e-12
# entrywise positivity threshold relative to the largest entry
_POSITIVITY_TOL = 1e-13
_FACTORIZATION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly increasing positive evaluation times, at least three."""

    times: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        if times.ndim != 1 or len(times) < 3:
            raise ValidationError("a time grid needs at least 3 times")
        if not np.all(times > 0):
            raise ValidationError("grid times must be positive")
        if not np.all(np.diff(times) > 0):
            raise ValidationError("grid times must be strictly increasing")
        times.setflags(write=False)

    @classmethod
    def geometric(cls, t0: float = 1.0, ratio: float = 1.5,
                  count: int = 20) -> "TimeGrid":
        if t0 <= 0 or ratio <= 1 or count < 3:
            raise ValidationError("need t0 > 0, ratio > 1 and count >= 3")
        return cls(t0 * ratio ** np.arange(count))

    def __len__(self) -> int:
        return len(self.times)


def _as_grid(grid) -> TimeGrid:
    if isinstance(grid, TimeGrid):
        return grid
    return TimeGrid(np.asarray(grid, dtype=float))


@dataclass(frozen=True, eq=False)
class RateEstimate:
    """Rate estimators along a grid, with the spectral target.

    Sign convention: estimates approach ``target`` which is E0 (or the
    bottom of the joint spectral support), i.e. minus the exponential
    rate of the quantity itself.  ``cesaro`` is -log q(t)/t at the last
    grid time, ``differenced`` the difference quotient over the last
    pair; the histories carry one value per grid time, with the leading
    entry of the differenced/residual columns undefined (nan).
    """

    times: np.ndarray
    log_values: np.ndarray
    target: float
    cesaro_history: np.ndarray
    differenced_history: np.ndarray
    residual_history: np.ndarray

    @property
    def cesaro(self) -> float:
        return float(self.cesaro_history[-1])

    @property
    def differenced(self) -> float:
        return float(self.differenced_history[-1])


def _grouped_pairing(sd: SpectralData, f, g) -> tuple[np.ndarray, np.ndarray]:
    """Group energies and signed weights of t -> <f, e^{-tL} g>_m."""
    wf = coefficients(sd, f)
    wg = coefficients(sd, g)
    prod = wf * wg
    energies = np.array([np.mean(sd.eigenvalues[a:b]) for a, b in sd.groups])
    weights = np.array([np.sum(prod[a:b]) for a, b in sd.groups])
    return energies, weights


def _log_sum_atoms(energies: np.ndarray, weights: np.ndarray,
                   times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """log |sum_i w_i e^{-t E_i}| and its sign, per time."""
    a = -np.outer(times, energies)
    logs, signs = logsumexp(a, b=weights[None, :], axis=1, return_sign=True)
    return logs, signs


def _estimate(times: np.ndarray, logs: np.ndarray, target: float
              ) -> RateEstimate:
    cesaro = -logs / times
    diffs = np.full_like(times, np.nan)
    diffs[1:] = -np.diff(logs) / np.diff(times)
    residuals = np.abs(diffs - target)
    return RateEstimate(times=times, log_values=logs, target=float(target),
                        cesaro_history=cesaro, differenced_history=diffs,
                        residual_history=residuals)


def rate_inner(op: OperatorRep, f, g, grid) -> RateEstimate:
    """Rate estimators for q(t) = <f, e^{-tL} g>_m along the grid.

    The target is the smallest eigenvalue carrying joint spectral mass
    of f and g; for f = g that is the bottom of supp rho_f, and for
    positive f, g on a connected graph it is E0.

    Raises
    ------
    NonPositivePairing
        If q(t) fails to be strictly positive at some grid time.
    """
    grid = _as_grid(grid)
    sd = eigendecompose(op)
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    energies, weights = _grouped_pairing(sd, f, g)
    scale = op.norm(f) * op.norm(g)
    supported = np.abs(weights) > _SUPPORT_TOL * scale
    if not supported.any():
        raise NonPositivePairing("<f, e^{-tL} g> vanishes identically")
    # atoms of sub-resolution mass are projection noise, not support;
    # carried along they would hijack the estimate once t is large
    # enough for their energy to win
    energies, weights = energies[supported], weights[supported]
    logs, signs = _log_sum_atoms(energies, weights, grid.times)
    if np.any(signs <= 0):
        t_bad = grid.times[np.flatnonzero(signs <= 0)[0]]
        raise NonPositivePairing(f"<f, e^{{-tL}} g> <= 0 at t = {t_bad}")
    target = float(np.min(energies))
    return _estimate(grid.times, logs, target)


def kernel_factorization_defects(op: OperatorRep, x, y, grid) -> np.ndarray:
    """|log| defects of p_{t+2}(x,y) = <g_x, e^{-tL} g_y>_m per grid time.

    The kernel functions g_x = p_1(x, .) are produced by the
    scaling-squaring evaluator while the left-hand side comes from the
    spectral expansion, so the identity genuinely ties two independent
    paths together.
    """
    grid = _as_grid(grid)
    sd = eigendecompose(op)
    ix = op.graph.vertex_index(x)
    iy = op.graph.vertex_index(y)
    ker = heat_kernel(op, 1.0, SCALING_SQUARING)
    energies, weights = _grouped_pairing(sd, ker.p[ix], ker.p[iy])
    e_k, w_k = _kernel_atoms(sd, ix, iy)
    # both sides carry the same atoms (weight_rhs = e^{-2E} weight_lhs),
    # so one noise mask keeps the two sums comparable at every t
    scale = op.norm(ker.p[ix]) * op.norm(ker.p[iy])
    keep = np.abs(weights) > _SUPPORT_TOL * scale
    if not keep.any():
        raise ZeroKernelEntry(
            f"p_t({x},{y}) vanishes identically; vertices are not connected"
        )
    rhs, _ = _log_sum_atoms(energies[keep], weights[keep], grid.times)
    lhs, _ = _log_sum_atoms(e_k[keep], w_k[keep], grid.times + 2.0)
    return np.abs(lhs - rhs)


def _kernel_atoms(sd: SpectralData, ix: int, iy: int
                  ) -> tuple[np.ndarray, np.ndarray]:
    prod = sd.vectors[ix, :] * sd.vectors[iy, :]
    energies = np.array([np.mean(sd.eigenvalues[a:b]) for a, b in sd.groups])
    weights = np.array([np.sum(prod[a:b]) for a, b in sd.groups])
    return energies, weights


def rate_kernel(op: OperatorRep, x, y, grid) -> RateEstimate:
    """Rate estimators for the kernel entry t -> p_t(x, y).

    On a connected graph both estimators approach E0.  Each call also
    verifies the two-sided kernel identity p_{t+2}(x,y) =
    <p_1(x,.), e^{-tL} p_1(y,.)>_m at every grid time to 1e-9 and raises
    InvariantViolation when it fails.

    Raises
    ------
    ZeroKernelEntry
        If x and y lie in different connected components.
    """
    grid = _as_grid(grid)
    sd = eigendecompose(op)
    ix = op.graph.vertex_index(x)
    iy = op.graph.vertex_index(y)
    energies, weights = _kernel_atoms(sd, ix, iy)
    scale = np.sqrt(np.sum(sd.vectors[ix, :] ** 2)
                    * np.sum(sd.vectors[iy, :] ** 2))
    supported = np.abs(weights) > 1e-13 * scale
    if not supported.any():
        raise ZeroKernelEntry(
            f"p_t({x},{y}) vanishes identically; vertices are not connected"
        )
    energies, weights = energies[supported], weights[supported]
    logs, signs = _log_sum_atoms(energies, weights, grid.times)
    if np.any(signs <= 0):
        t_bad = grid.times[np.flatnonzero(signs <= 0)[0]]
        raise ZeroKernelEntry(f"p_t({x},{y}) <= 0 at t = {t_bad}")
    defects = kernel_factorization_defects(op, x, y, grid)
    if np.any(defects > _FACTORIZATION_TOL):
        raise InvariantViolation(
            "kernel factorization identity violated: max log-defect "
            f"{np.max(defects):.2e} over the grid"
        )
    target = float(np.min(energies))
    return _estimate(grid.times, logs, target)


@dataclass(frozen=True, eq=False)
class GroundStateProfile:
    """Ground state extracted from the kernel diagonal.

    ``Phi`` is (e^{t E0} p_t(x,x))^{1/2} at the last grid time; on a
    connected graph it is entrywise positive with ||Phi||_m = 1 up to
    the leftover excited mass e^{-(E1-E0) t}.  ``Phi_t_history`` stacks
    the same quantity for every grid time, ``residual_history`` the
    factorization residuals max_{x,y} |e^{t E0} p_t(x,y) - Phi(x)Phi(y)|.
    """

    times: np.ndarray
    Phi: np.ndarray
    Phi_t_history: np.ndarray
    residual_history: np.ndarray
    is_eigenvalue_detected: bool


def _scaled_kernel(sd: SpectralData, t: float) -> np.ndarray:
    """e^{t E0} p_t as a matrix; exponents are all <= 0, so this is safe."""
    decay = np.exp(np.maximum(-t * (sd.eigenvalues - sd.E0), -745.0))
    return (sd.vectors * decay) @ sd.vectors.T


def groundstate_limit(op: OperatorRep, grid,
                      detection_threshold: float = 1e-6) -> GroundStateProfile:
    """Ground-state profile and factorization residuals along the grid.

    The residuals are required to decay like e^{-(E1-E0) t}: each one is
    checked against 10 * C * e^{-(E1-E0)(t-2)} with the constant C
    calibrated from the kernel functions as e^{2 E0} max_x p_2(x, x).

    Raises
    ------
    NoSpectralGap
        If E1 - E0 is numerically zero.
    InvariantViolation
        If some residual escapes the decay envelope.
    """
    grid = _as_grid(grid)
    sd = eigendecompose(op)
    # gap counted with multiplicity: a degenerate ground state (always a
    # disconnected graph) has no product-state limit in the first place
    if op.n > 1:
        gap = float(sd.eigenvalues[1] - sd.eigenvalues[0])
        if gap <= 1e-8 * (1.0 + abs(sd.E0)):
            raise NoSpectralGap(f"E1 - E0 = {gap:.2e} is below resolution")
    diag_profiles = []
    for t in grid.times:
        decay = np.exp(np.maximum(-t * (sd.eigenvalues - sd.E0), -745.0))
        diag_profiles.append(np.sqrt((sd.vectors ** 2) @ decay))
    history = np.array(diag_profiles)
    Phi = history[-1]
    outer = np.outer(Phi, Phi)
    residuals = np.array([
        np.max(np.abs(_scaled_kernel(sd, t) - outer)) for t in grid.times
    ])
    if op.n > 1:
        # decay envelope, constant calibrated from the kernel functions g_x
        p2_diag = (sd.vectors ** 2) @ np.exp(
            np.maximum(-2.0 * (sd.eigenvalues - sd.E0), -745.0))
        C = float(np.max(p2_diag))
        envelope = 10.0 * C * np.exp(
            np.minimum(-gap * (grid.times - 2.0), 700.0))
        floor = 64.0 * op.n * np.finfo(float).eps * C
        bad = residuals > np.maximum(envelope, floor)
        if bad.any():
            j = int(np.flatnonzero(bad)[0])
            raise InvariantViolation(
                f"factorization residual {residuals[j]:.2e} at t = "
                f"{grid.times[j]} escapes the spectral-gap envelope "
                f"{envelope[j]:.2e}"
            )
    detected = bool(np.max(Phi) > detection_threshold)
    return GroundStateProfile(times=grid.times, Phi=Phi,
                              Phi_t_history=history,
                              residual_history=residuals,
                              is_eigenvalue_detected=detected)


def eigenvalue_detector(op: OperatorRep, x, grid,
                        threshold: float = 1e-6) -> bool:
    """Whether Phi_t(x) = (e^{t E0} p_t(x,x))^{1/2} stays above threshold.

    A positive limit detects that E0 is an eigenvalue whose ground state
    does not vanish at x; under exhaustion (spectrum bottom not an
    eigenvalue) the profile would drain to zero instead.
    """
    grid = _as_grid(grid)
    sd = eigendecompose(op)
    ix = op.graph.vertex_index(x)
    t = grid.times[-1]
    decay = np.exp(np.maximum(-t * (sd.eigenvalues - sd.E0), -745.0))
    phi_t = np.sqrt(np.sum(sd.vectors[ix, :] ** 2 * decay))
    return bool(phi_t > threshold)


def strong_convergence_check(op: OperatorRep, f, grid) -> np.ndarray:
    """Residuals ||e^{t E0} e^{-tL} f - P f||_m per grid time.

    They are bounded by ||f||_m e^{-(E' - E0) t} with E' the bottom of
    the spectral support of (I - P) f, which is what the calling tests
    assert.
    """
    grid = _as_grid(grid)
    sd = eigendecompose(op)
    f = np.asarray(f, dtype=float)
    coeff = coefficients(sd, f)
    _, stop = sd.groups[0]
    exc_coeff = coeff[stop:]
    exc_energies = sd.eigenvalues[stop:]
    residuals = np.empty(len(grid.times))
    for j, t in enumerate(grid.times):
        decay = np.exp(np.maximum(-2.0 * t * (exc_energies - sd.E0), -745.0))
        residuals[j] = np.sqrt(np.sum(exc_coeff ** 2 * decay))
    return residuals


def positivity_improving(op: OperatorRep) -> bool:
    """Entrywise positivity of e^{-L}, cross-checked two independent ways.

    The verdict comes from the scaling-squaring exponential of -S; it is
    cross-checked against entrywise positivity of the resolvent at
    alpha = 1 - E0 and against graph connectivity.  Any disagreement
    raises PositivityConnectivityMismatch, because for graphs these
    three are provably the same thing.
    """
    if op.graph is None:
        raise ValueError("operator carries no graph; cannot cross-check")
    E, _ = pade13_expm(-op.S)
    kernel_verdict = bool(np.min(E) > _POSITIVITY_TOL * np.max(E))
    sd = eigendecompose(op)
    R = resolvent(op, 1.0 - sd.E0)
    resolvent_verdict = bool(np.min(R) > _POSITIVITY_TOL * np.max(R))
    connected = is_connected(op.graph)
    if kernel_verdict != connected or resolvent_verdict != connected:
        raise PositivityConnectivityMismatch(
            f"kernel positivity {kernel_verdict}, resolvent positivity "
            f"{resolvent_verdict}, connectivity {connected}"
        )
    return kernel_verdict
