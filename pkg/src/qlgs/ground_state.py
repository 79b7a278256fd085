"""Positive radial decreasing ground states of

    -Delta u - u Delta(u^2) + omega u - |u|^(p-1) u = 0,   1 < p < p_max(N),

computed by shooting + amplitude bisection, with the integral identities the
profile must satisfy (virial, and in dimension 2 the Pohozaev relation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .grid import (
    GridFunction,
    RadialGrid,
    coarsen,
    extend,
    quad_values,
)
from .shooting import (
    IntegrationError,
    SolveError,
    SolverOptions,
    classify,
    curvature,
    raw_shot,
    solve_profile,
)

__all__ = [
    "Params",
    "GroundState",
    "pmax",
    "shoot_ivp",
    "find_ground_state",
    "energy",
    "energy_terms",
    "identity_residuals",
    "laplacian_usq",
    "equation_residual",
    "restrict_profile",
    "extend_profile",
    "write_profile_csv",
    "SolverOptions",
    "SolveError",
    "IntegrationError",
]


def pmax(dim: int) -> float:
    """Largest admissible nonlinearity exponent: (3N+2)/(N-2), infinite for
    N = 1, 2."""
    if int(dim) != dim or dim < 1:
        raise ValueError(f"spatial dimension must be an integer >= 1, got {dim}")
    if dim <= 2:
        return math.inf
    return (3.0 * dim + 2.0) / (dim - 2.0)


@dataclass(frozen=True)
class Params:
    """Configuration (N, p, omega) of the quasilinear equation."""

    dim: int
    p: float
    omega: float

    def __post_init__(self):
        lim = pmax(self.dim)
        if not (1.0 < self.p < lim):
            raise ValueError(
                f"p must lie strictly in (1, {lim}) for N={self.dim}, got {self.p}"
            )
        if not (self.omega > 0.0 and math.isfinite(self.omega)):
            raise ValueError(f"omega must be positive, got {self.omega}")

    @property
    def rest_amplitude(self) -> float:
        """Positive zero of omega*u - u^p; shot amplitudes must exceed it."""
        return self.omega ** (1.0 / (self.p - 1.0))


@dataclass(frozen=True)
class GroundState:
    """Radial profile with its derivative and curvature plus solve metadata.

    ddu comes from the profile equation evaluated on (u, du), not from
    differencing u.  Past match_radius the profile is the grafted tail
    u(r_m) * exp(-sqrt(omega) (r - r_m)).
    """

    params: "Params"
    grid: RadialGrid
    u: GridFunction
    du: GridFunction
    ddu: GridFunction
    amplitude: float
    tail_rate: float
    resid_max: float
    bracket: tuple[float, float] = (0.0, 0.0)
    match_index: int = -1
    match_radius: float = 0.0
    n_shots: int = 0

    @property
    def quasilinear(self) -> bool:
        return not getattr(self.params, "semilinear", False)

    @property
    def exponent(self) -> float:
        return self.params.p


def shoot_ivp(amplitude: float, params: Params, grid: RadialGrid,
              opts: SolverOptions | None = None):
    """One shot from u(0)=amplitude, u'(0)=0, classified as overshoot,
    undershoot, or converged.  Returns (outcome, (u, u') grid functions);
    values past the stopping node are held constant."""
    opts = opts or SolverOptions()
    if amplitude <= 0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    thr = opts.tail_frac * amplitude
    eps = opts.stag_eps * amplitude * max(1.0, math.sqrt(params.omega))
    status, stop, u, v = raw_shot(
        amplitude, params.dim, params.p, params.omega, grid, True, thr, eps,
        opts.stag_run,
    )
    outcome = classify(status, stop, u, v, grid, thr)
    return outcome, (GridFunction(grid, u), GridFunction(grid, v))


def _auto_resid_tol(grid: RadialGrid, omega: float, amplitude: float,
                    u: np.ndarray, ddu: np.ndarray) -> float:
    """Truncation-scaled guard: the 3-point residual of an exact solution is
    about (h^2/12) (1+2u^2) |u''''|, so the tolerance follows the measured
    profile stiffness (with headroom) and a coarse floor."""
    base = 100.0 * grid.h ** 2 * max(omega, 1.0) ** 2 * max(amplitude, 1.0)
    d4 = np.abs(np.diff(ddu, 2)) / grid.h ** 2
    stiff = float(np.max((1.0 + 2.0 * u[1:-1] ** 2) * d4)) if d4.size else 0.0
    return max(base, 20.0 * grid.h ** 2 / 12.0 * stiff)


def _package(params, sol, resid_tol=None) -> GroundState:
    grid = sol.grid
    # the stiffness-scaled tolerance is only meaningful on a resolved core
    step_change = grid.h * float(np.max(np.abs(sol.du)))
    if step_change > 0.05 * sol.amplitude:
        raise SolveError(
            f"mesh does not resolve the core: |u'| h = {step_change:.3g} "
            f"against amplitude {sol.amplitude:.3g}; increase nodes"
        )
    resid = _residual_values(grid, params.dim, sol.u, params.p, params.omega,
                             quasilinear=not getattr(params, "semilinear", False))
    j_m = sol.match_index
    interior = resid[1:j_m] if j_m >= 2 else resid[1:-1]
    resid_max = float(np.max(np.abs(interior))) if interior.size else 0.0
    tol = resid_tol if resid_tol is not None else _auto_resid_tol(
        grid, params.omega, sol.amplitude, sol.u, sol.ddu)
    if resid_max > tol:
        raise SolveError(
            f"equation residual {resid_max:.3e} exceeds tolerance {tol:.3e}; "
            "refine the mesh"
        )
    gs = GroundState(
        params=params,
        grid=grid,
        u=GridFunction(grid, sol.u),
        du=GridFunction(grid, sol.du),
        ddu=GridFunction(grid, sol.ddu),
        amplitude=sol.amplitude,
        tail_rate=sol.tail_rate,
        resid_max=resid_max,
        bracket=sol.bracket,
        match_index=j_m,
        match_radius=sol.match_radius,
        n_shots=sol.n_shots,
    )
    _check_invariants(gs)
    return gs


def _check_invariants(gs: GroundState):
    u = gs.u.values
    du = gs.du.values
    if not np.all(u[:-1] > 0.0) or u[-1] < 0.0:
        raise SolveError("profile is not positive")
    if np.any(du > 0.0):
        raise SolveError("profile is not monotone decreasing")
    if u[0] != gs.amplitude:
        raise SolveError("amplitude does not match u(0)")


def find_ground_state(params: Params, opts: SolverOptions | None = None,
                      grid: RadialGrid | None = None) -> GroundState:
    """Ground-state profile by bisection between a bracketing undershoot and
    overshoot, with the analytic exponential tail grafted past the matching
    radius."""
    opts = opts or SolverOptions()
    sol = solve_profile(params.dim, params.p, params.omega, True, opts, grid)
    return _package(params, sol, opts.resid_tol)


def _residual_values(grid, dim, u, expo, omega, quasilinear=True) -> np.ndarray:
    """Pointwise strong-form residual from 3-point differences of u; zero at
    the two boundary nodes."""
    h = grid.h
    r = grid.r
    res = np.zeros(grid.nodes)
    ui = u[1:-1]
    dfd = (u[2:] - u[:-2]) / (2.0 * h)
    ddfd = (u[2:] - 2.0 * ui + u[:-2]) / h**2
    lap = ddfd + (dim - 1.0) * dfd / r[1:-1]
    pw = np.abs(ui) ** (expo - 1.0) * ui
    if quasilinear:
        res[1:-1] = -(1.0 + 2.0 * ui**2) * lap - 2.0 * ui * dfd**2 \
            + omega * ui - pw
    else:
        res[1:-1] = -lap + omega * ui - pw
    return res


def equation_residual(gs: GroundState) -> GridFunction:
    """Strong-form residual of the profile equation on gs's own grid."""
    vals = _residual_values(gs.grid, gs.params.dim, gs.u.values, gs.exponent,
                            gs.params.omega, gs.quasilinear)
    return GridFunction(gs.grid, vals)


def energy_terms(gs: GroundState) -> dict[str, float]:
    """The four weighted integrals entering the energy, separately."""
    u = gs.u.values
    du = gs.du.values
    g = gs.grid
    p = gs.exponent
    return {
        "gradient": quad_values(g, du**2),
        "quasilinear": quad_values(g, u**2 * du**2),
        "mass": quad_values(g, u**2),
        "power": quad_values(g, np.abs(u) ** (p + 1.0)),
    }


def energy(gs: GroundState) -> float:
    """Action value: int [ (u')^2/2 + u^2 (u')^2 + omega u^2 / 2
    - u^(p+1)/(p+1) ] r^(N-1) dr."""
    t = energy_terms(gs)
    p = gs.exponent
    omega = gs.params.omega
    return (0.5 * t["gradient"] + t["quasilinear"] + 0.5 * omega * t["mass"]
            - t["power"] / (p + 1.0))


def identity_residuals(gs: GroundState) -> dict[str, float | None]:
    """Relative defects of the virial identity and, for N = 2, the Pohozaev
    identity.  Each residual is |LHS - RHS| / max(|LHS|, |RHS|).

    Multiplying the profile equation by u and integrating by parts gives
    int (u')^2 + 4 int u^2 (u')^2 + omega int u^2 = int u^(p+1); for the
    semilinear baseline the quasilinear term is absent."""
    t = energy_terms(gs)
    omega = gs.params.omega
    p = gs.exponent

    def rel(lhs, rhs):
        denom = max(abs(lhs), abs(rhs))
        if denom == 0.0:
            return 0.0
        return abs(lhs - rhs) / denom

    quasi = 4.0 * t["quasilinear"] if gs.quasilinear else 0.0
    virial = rel(t["gradient"] + quasi + omega * t["mass"], t["power"])
    out: dict[str, float | None] = {"virial": virial, "pohozaev2d": None}
    if gs.params.dim == 2:
        out["pohozaev2d"] = rel(omega * t["mass"], 2.0 * t["power"] / (p + 1.0))
    return out


def laplacian_usq(gs: GroundState) -> np.ndarray:
    """Delta(u^2) = 2 u u'' + 2 (u')^2 + 2 (N-1) u u' / r, with the r -> 0
    limit 2 N u(0) u''(0)."""
    u = gs.u.values
    du = gs.du.values
    ddu = gs.ddu.values
    r = gs.grid.r
    dim = gs.grid.dim
    out = np.empty_like(u)
    out[1:] = 2.0 * u[1:] * ddu[1:] + 2.0 * du[1:] ** 2 \
        + 2.0 * (dim - 1.0) * u[1:] * du[1:] / r[1:]
    out[0] = 2.0 * dim * u[0] * ddu[0]
    return out


def restrict_profile(gs: GroundState, factor: int = 2) -> GroundState:
    """Same profile on every factor-th node (grids nest, so restriction is
    exact sampling).  resid_max is re-measured on the coarse stencil."""
    cg = coarsen(gs.grid, factor)
    u = gs.u.values[::factor]
    du = gs.du.values[::factor]
    ddu = gs.ddu.values[::factor]
    resid = _residual_values(cg, gs.params.dim, u, gs.exponent,
                             gs.params.omega, gs.quasilinear)
    j_m = gs.match_index // factor
    interior = resid[1:j_m] if j_m >= 2 else resid[1:-1]
    return replace(
        gs,
        grid=cg,
        u=GridFunction(cg, u),
        du=GridFunction(cg, du),
        ddu=GridFunction(cg, ddu),
        resid_max=float(np.max(np.abs(interior))) if interior.size else 0.0,
        match_index=j_m,
    )


def extend_profile(gs: GroundState, factor: int = 2) -> GroundState:
    """Profile continued to factor*R at the same mesh width, using the
    analytic tail anchored at the matching node."""
    eg = extend(gs.grid, factor)
    n_old = gs.grid.nodes
    anchor = gs.match_index if 0 <= gs.match_index < n_old else n_old - 1
    root = math.sqrt(gs.params.omega)
    u = np.empty(eg.nodes)
    du = np.empty(eg.nodes)
    u[:n_old] = gs.u.values
    du[:n_old] = gs.du.values
    tail_r = eg.r[n_old:]
    u[n_old:] = gs.u.values[anchor] * np.exp(-root * (tail_r - gs.grid.r[anchor]))
    du[n_old:] = -root * u[n_old:]
    ddu = curvature(gs.params.dim, gs.exponent, gs.params.omega,
                    gs.quasilinear, eg.r, u, du)
    return replace(
        gs,
        grid=eg,
        u=GridFunction(eg, u),
        du=GridFunction(eg, du),
        ddu=GridFunction(eg, ddu),
    )


def write_profile_csv(gs: GroundState, path) -> None:
    """CSV export `r,u,du,residual`, one row per node, lossless decimals."""
    resid = equation_residual(gs).values
    r = gs.grid.r
    u = gs.u.values
    du = gs.du.values
    with open(path, "w", newline="") as f:
        f.write("r,u,du,residual\n")
        for j in range(gs.grid.nodes):
            f.write(f"{float(r[j])!r},{float(u[j])!r},"
                    f"{float(du[j])!r},{float(resid[j])!r}\n")
