"""Potentials, truncation ladders, admissibility and Schroedinger evolution.

A potential V >= 0 perturbs the operator to L - V, realized by moving V
into the killing term (c is replaced by c - V m, which flips its sign
constraint but changes nothing structurally).  Because V may be huge on
parts of the graph, everything is organized around monotone truncations
V ^ k = min(V, k):

* e^{-t(L - V^k)} increases entrywise in k and converges (here: becomes
  exact once k >= max V) to S_V(t), the minimal Schroedinger semigroup.
* A bound S_V(t) <= e^{-Et} holds iff every truncated pairing satisfies
  <f, e^{-t(L-V^k)} g> <= ||f|| ||g|| e^{-Et} iff the variational ground
  energy lambda0(L, V) is >= E.  :func:`admissibility_check` evaluates
  all three readings independently and insists they agree.
* Exhaustion sequences of growing graphs can push lambda0 to -infinity;
  :func:`exhaustion_divergence_probe` flags that divergence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EquivalenceViolation,
    InvariantViolation,
    NegativeInitialDatum,
    NegativeWeight,
    ValidationError,
)
from .graphs import WeightedGraph
from .operators import OperatorRep, assemble, eigendecompose, shift_by_potential
from .semigroup import apply as sg_apply
from .asymptotics import _as_grid, _grouped_pairing, _log_sum_atoms

__all__ = [
    "Potential",
    "TruncationLadder",
    "SvReport",
    "AdmissibilityVerdict",
    "ApproximatedSolution",
    "ProbeReport",
    "lambda0",
    "truncated_semigroup",
    "truncation_ladder",
    "sv_limit",
    "admissibility_check",
    "approximated_solution",
    "exhaustion_divergence_probe",
]


@dataclass(frozen=True, eq=False)
class Potential:
    """Non-negative potential aligned with a graph's vertex order."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise NegativeWeight("potentials must be non-negative and finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(cls, g: WeightedGraph, mapping: dict) -> "Potential":
        """Build from {vertex id: value}; missing vertices get 0."""
        values = np.zeros(g.n)
        for vid, val in mapping.items():
            values[g.vertex_index(str(vid))] = float(val)
        return cls(values)


def _as_values(op: OperatorRep, V) -> np.ndarray:
    if isinstance(V, Potential):
        values = V.values
    elif isinstance(V, dict):
        if op.graph is None:
            raise ValueError("mapping potentials need a graph-backed operator")
        values = Potential.from_mapping(op.graph, V).values
    else:
        values = Potential(np.asarray(V, dtype=float)).values
    if values.shape != (op.n,):
        raise ValueError(f"potential must have shape ({op.n},)")
    return values


def lambda0(op: OperatorRep, V) -> float:
    """Variational ground energy inf spec(L - V).

    Equals min over u of Q(u) - <V u, u>_m with ||u||_m = 1; computed as
    the bottom eigenvalue of the shifted operator.  The Perron structure
    survives the sign-indefinite killing term: the ground vector of the
    shifted operator is still strictly positive on a connected graph,
    which is asserted here.
    """
    values = _as_values(op, V)
    shifted = shift_by_potential(op, values)
    sd = eigendecompose(shifted)
    if op.graph is not None:
        from .graphs import is_connected
        ground = sd.vectors[:, 0]
        # strictly positive in exact arithmetic; leave room for entries
        # that localization pushes below resolution
        floor = -1e-12 * float(np.max(np.abs(ground)))
        start, stop = sd.groups[0]
        if (is_connected(op.graph) and stop - start == 1
                and not np.all(ground >= floor)):
            raise InvariantViolation(
                "ground state of L - V lost strict positivity"
            )
    return sd.E0


def truncated_semigroup(op: OperatorRep, V, k: float, t: float, f
                        ) -> np.ndarray:
    """e^{-t(L - V^k)} f with the truncated potential V^k = min(V, k)."""
    values = _as_values(op, V)
    shifted = shift_by_potential(op, np.minimum(values, k))
    return sg_apply(shifted, t, f)


@dataclass(frozen=True, eq=False)
class TruncationLadder:
    """Joint truncation of potential and initial datum.

    ``trajectories[i, j]`` is e^{-t_j (L - V^{k_i})} f_{k_i} with
    f_k = min(f, k); both families increase in k, so the trajectories
    increase entrywise as well.
    """

    ks: tuple[float, ...]
    times: np.ndarray
    f: np.ndarray
    f_ks: np.ndarray
    trajectories: np.ndarray


def truncation_ladder(op: OperatorRep, V, f, grid, ks) -> TruncationLadder:
    grid = _as_grid(grid)
    values = _as_values(op, V)
    f = np.asarray(f, dtype=float)
    ks = tuple(sorted(float(k) for k in ks))
    f_ks = np.array([np.minimum(f, k) for k in ks])
    trajectories = np.empty((len(ks), len(grid.times), op.n))
    for i, k in enumerate(ks):
        shifted = shift_by_potential(op, np.minimum(values, k))
        for j, t in enumerate(grid.times):
            trajectories[i, j] = sg_apply(shifted, t, f_ks[i])
    return TruncationLadder(ks=ks, times=grid.times, f=f, f_ks=f_ks,
                            trajectories=trajectories)


@dataclass(frozen=True, eq=False)
class SvReport:
    """Limit of the truncated semigroups applied to f at one time.

    ``k_converged`` is the first ladder level whose distance to the
    previous one fell below 1e-12 (None if the ladder never settled);
    the law and continuity fields record the internal consistency
    checks.
    """

    value: np.ndarray
    t: float
    ks: tuple[float, ...]
    ladder_gaps: np.ndarray
    k_converged: float | None
    semigroup_law_residual: float
    continuity_times: np.ndarray
    continuity_gaps: np.ndarray


def sv_limit(op: OperatorRep, V, t: float, f, ks) -> SvReport:
    """S_V(t) f as the monotone limit of truncated semigroups.

    On a finite graph the limit is attained at any k >= max V; the
    report records where the supplied ladder settled, the semigroup law
    residual ||S_V(0.3 t) S_V(0.7 t) f - S_V(t) f||_m and the small-time
    continuity gaps ||S_V(tau) f - f||_m along tau = t 2^{-j}.  The
    continuity gaps are also checked against the closed inequality
    ||S_V(tau) f - e^{-tau L} f||^2 <= ||S_V(tau) f||^2 - ||e^{-tau L} f||^2,
    which is what makes them collapse as tau -> 0.
    """
    values = _as_values(op, V)
    f = np.asarray(f, dtype=float)
    ks = tuple(sorted(float(k) for k in ks))
    full = shift_by_potential(op, values)
    value = sg_apply(full, t, f)
    prev = None
    gaps = []
    k_converged = None
    for k in ks:
        cur = truncated_semigroup(op, values, k, t, f)
        if prev is not None:
            gap = float(np.sqrt(np.sum((cur - prev) ** 2 * op.m)))
            gaps.append(gap)
            if k_converged is None and gap < 1e-12:
                k_converged = k
        prev = cur
    half_a = sg_apply(full, 0.3 * t, f)
    composed = sg_apply(full, 0.7 * t, half_a)
    law_residual = float(np.sqrt(np.sum((composed - value) ** 2 * op.m)))
    taus = t * 0.5 ** np.arange(1, 11)
    cont_gaps = np.empty(len(taus))
    for j, tau in enumerate(taus):
        u_v = sg_apply(full, tau, f)
        u_free = sg_apply(op, tau, f)
        cont_gaps[j] = np.sqrt(np.sum((u_v - f) ** 2 * op.m))
        lhs = np.sum((u_v - u_free) ** 2 * op.m)
        rhs = np.sum(u_v ** 2 * op.m) - np.sum(u_free ** 2 * op.m)
        scale = max(1.0, float(np.sum(f ** 2 * op.m)))
        if lhs > rhs + 1e-12 * scale:
            raise InvariantViolation(
                f"small-time continuity inequality violated at tau = {tau}"
            )
    return SvReport(value=value, t=float(t), ks=ks,
                    ladder_gaps=np.asarray(gaps), k_converged=k_converged,
                    semigroup_law_residual=law_residual,
                    continuity_times=taus, continuity_gaps=cont_gaps)


@dataclass(frozen=True, eq=False)
class AdmissibilityVerdict:
    """Outcome of the three equivalent admissibility readings for (V, E).

    (i)   ||S_V(t)|| <= e^{-Et} (exact operator norm),
    (ii)  <f, S_V(t) g> <= ||f|| ||g|| e^{-Et} for all t (decided on the
          exact exponential rate of the pairing),
    (iii) lambda0(L, V) >= E.

    ``M`` is the worst log-margin of the truncated pairings against the
    (ii) bound over the grid; it is <= ~0 when the verdict is positive
    and grows linearly in t when it is not.
    """

    E: float
    lambda0: float
    M: float
    holds_i: bool
    holds_ii: bool
    holds_iii: bool

    @property
    def admissible(self) -> bool:
        return self.holds_iii

    def to_dict(self) -> dict:
        return {
            "E": self.E,
            "lambda0": self.lambda0,
            "M": self.M,
            "holds_i": self.holds_i,
            "holds_ii": self.holds_ii,
            "holds_iii": self.holds_iii,
            "admissible": self.admissible,
        }


def admissibility_check(op: OperatorRep, V, E: float, f, g, grid, ks
                        ) -> AdmissibilityVerdict:
    """Evaluate the admissibility criteria (i), (ii), (iii) independently.

    (i) compares the exact operator norm e^{-t lambda0} of the limit
    semigroup against e^{-tE}; (ii) asks that the pairing <f, S_V(t) g>
    never outgrows ||f|| ||g|| e^{-tE}, decided on the exact exponential
    rate of the pairing (the bottom of its spectral support) because at
    any finite time the Cauchy-Schwarz prefactor can mask an E that
    exceeds lambda0 by an arbitrarily small margin; (iii) compares
    lambda0 and E directly.  All three must agree; a disagreement raises
    EquivalenceViolation since on a finite graph they are provably
    equivalent.  The truncated pairings along ``ks`` are additionally
    required to obey the (ii) bound at the grid times whenever the
    verdict is positive, and ``M`` records their worst log-margin.
    """
    grid = _as_grid(grid)
    values = _as_values(op, V)
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if not (np.all(f > 0) and np.all(g > 0)):
        raise ValidationError(
            "the pairing criterion needs entrywise positive f and g"
        )
    norms = op.norm(f) * op.norm(g)
    slack = math.log1p(1e-10)
    tol = 1e-10 * (1.0 + abs(E))

    lam = lambda0(op, values)
    holds_iii = lam >= E - tol

    # (i): log ||S_V(t)|| = -t lambda0 exactly, compared per grid time
    holds_i = bool(np.all(-grid.times * lam <= -grid.times * E + slack))

    # (ii): the pairing grows like e^{-t inf supp}; the bound holds for
    # all t iff that bottom stays at or above E
    full = shift_by_potential(op, values)
    energies, weights = _grouped_pairing(eigendecompose(full), f, g)
    supported = np.abs(weights) > 1e-12 * norms
    if not supported.any():
        raise EquivalenceViolation(
            "positive f, g lost all spectral mass under L - V"
        )
    holds_ii = bool(np.min(energies[supported]) >= E - tol)

    if not (holds_i == holds_ii == holds_iii):
        raise EquivalenceViolation(
            f"admissibility criteria disagree: (i)={holds_i} "
            f"(ii)={holds_ii} (iii)={holds_iii} for E={E}, lambda0={lam}"
        )

    log_M = math.log(norms) if norms > 0 else -math.inf
    worst = -math.inf
    for k in ks:
        shifted = shift_by_potential(op, np.minimum(values, k))
        sd = eigendecompose(shifted)
        e_k, w_k = _grouped_pairing(sd, f, g)
        logs, _ = _log_sum_atoms(e_k, w_k, grid.times)
        margins = logs - (log_M - E * grid.times)
        worst = max(worst, float(np.max(margins)))
        if holds_ii and np.any(margins > slack):
            raise EquivalenceViolation(
                f"truncated pairing at k={k} breaks the admitted bound "
                f"(margin {np.max(margins):.2e})"
            )
    return AdmissibilityVerdict(E=float(E), lambda0=float(lam), M=worst,
                                holds_i=holds_i, holds_ii=holds_ii,
                                holds_iii=holds_iii)


@dataclass(frozen=True, eq=False)
class ApproximatedSolution:
    """Evolution u(t) = lim_k e^{-t(L - V^k)} f_k for f >= 0.

    Carries the underlying truncation ladder, central-difference ODE
    residuals at the interior grid times (relative to ||u||_m) and the
    log-domain margins of the exponential bound
    ||u(t)||_m <= ||f||_m e^{-lambda0 t}.
    """

    times: np.ndarray
    values: np.ndarray
    ladder: TruncationLadder
    ode_residuals: np.ndarray
    log_bound_margins: np.ndarray
    continuity_times: np.ndarray
    continuity_gaps: np.ndarray
    lambda0: float


def approximated_solution(op: OperatorRep, V, f, grid, ks
                          ) -> ApproximatedSolution:
    """Solve u' + (L - V) u = 0, u(0) = f, through the truncation ladder.

    Raises
    ------
    NegativeInitialDatum
        If f has a negative entry; the approximating scheme
        f_k = min(f, k) needs f >= 0.
    """
    grid = _as_grid(grid)
    values = _as_values(op, V)
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise NegativeInitialDatum("initial datum must be non-negative")
    ladder = truncation_ladder(op, values, f, grid, ks)
    k_star = max(float(np.max(values, initial=0.0)),
                 float(np.max(f, initial=0.0))) + 1.0
    shifted = shift_by_potential(op, np.minimum(values, k_star))
    u = np.array([sg_apply(shifted, t, f) for t in grid.times])
    lam = lambda0(op, values)

    # central differences with a step tuned to the curvature scale
    rho = max(float(np.linalg.norm(shifted.S, 1)), 1.0)
    delta = (3.0 * np.finfo(float).eps) ** (1.0 / 3.0) / rho
    residuals = np.empty(max(len(grid.times) - 2, 0))
    for j in range(1, len(grid.times) - 1):
        t = grid.times[j]
        forward = sg_apply(shifted, t + delta, f)
        backward = sg_apply(shifted, t - delta, f)
        du = (forward - backward) / (2.0 * delta)
        res = du + shifted.A @ u[j]
        scale = float(np.sqrt(np.sum(u[j] ** 2 * op.m)))
        residuals[j - 1] = np.sqrt(np.sum(res ** 2 * op.m)) / max(scale, 1e-300)

    norm_f = op.norm(f)
    log_margins = np.empty(len(grid.times))
    for j, t in enumerate(grid.times):
        norm_u = float(np.sqrt(np.sum(u[j] ** 2 * op.m)))
        log_u = math.log(norm_u) if norm_u > 0 else -math.inf
        log_bound = (math.log(norm_f) if norm_f > 0 else -math.inf) - lam * t
        log_margins[j] = log_u - log_bound
    taus = grid.times[0] * 0.5 ** np.arange(1, 9)
    gaps = np.array([
        float(np.sqrt(np.sum((sg_apply(shifted, tau, f) - f) ** 2 * op.m)))
        for tau in taus
    ])
    return ApproximatedSolution(times=grid.times, values=u, ladder=ladder,
                                ode_residuals=residuals,
                                log_bound_margins=log_margins,
                                continuity_times=taus, continuity_gaps=gaps,
                                lambda0=lam)


@dataclass(frozen=True, eq=False)
class ProbeReport:
    """Per-stage ground energies of an exhaustion experiment.

    ``diverging`` is set when lambda0 keeps dropping by at least
    ``margin`` per stage across three or more stages; ``lambda0_limit``
    is then the sentinel -inf.
    """

    lambda0s: tuple[float, ...]
    sizes: tuple[int, ...]
    margin: float
    diverging: bool
    lambda0_limit: float
    truncation_energies: tuple[tuple[float, ...], ...]

    def to_dict(self) -> dict:
        return {
            "lambda0s": list(self.lambda0s),
            "sizes": list(self.sizes),
            "margin": self.margin,
            "diverging": self.diverging,
            "lambda0_limit": self.lambda0_limit,
            "truncation_energies": [list(row)
                                    for row in self.truncation_energies],
        }


def exhaustion_divergence_probe(stages, margin: float = 1.0,
                                ks=()) -> ProbeReport:
    """Track lambda0 along growing (graph, potential) stages.

    Parameters
    ----------
    stages : sequence of (WeightedGraph, potential) pairs
        Typically restrictions of one infinite model to growing balls.
    margin : float
        Drop per stage that counts as divergence; the flag is raised
        once the last two stage-to-stage drops both reach it across at
        least three stages, and the limit becomes the sentinel -inf.
    ks : sequence of float, optional
        Truncation levels; per stage the report then also carries
        E0(L - V^k), the upper bounds dominating lambda0.
    """
    lams = []
    sizes = []
    bounds = []
    for g, V in stages:
        op = assemble(g)
        values = _as_values(op, V)
        lams.append(lambda0(op, values))
        sizes.append(g.n)
        bounds.append(tuple(
            eigendecompose(shift_by_potential(op, np.minimum(values, k))).E0
            for k in ks))
    drops = [lams[i] - lams[i + 1] for i in range(len(lams) - 1)]
    diverging = len(lams) >= 3 and len(drops) >= 2 and all(
        d >= margin for d in drops[-2:]
    )
    limit = -math.inf if diverging else min(lams)
    return ProbeReport(lambda0s=tuple(lams), sizes=tuple(sizes),
                       margin=float(margin), diverging=diverging,
                       lambda0_limit=limit,
                       truncation_energies=tuple(bounds))
