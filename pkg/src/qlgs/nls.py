"""Semilinear baseline: the unique positive radial profile Q of

    -Delta Q + omega Q - Q^q = 0,

its linearization -Delta + omega - q Q^(q-1), and the Gagliardo-Nirenberg
quotient Q minimizes.  Everything here has a closed-form or fine-grid anchor,
so this module validates the grid / assembly / eigensolver stack: if a check
fails here, the quasilinear verdicts cannot be trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridFunction, RadialGrid, fd_derivative, quad_values
from .ground_state import GroundState, _package, _residual_values
from .sectors import assemble_aplus, form_value, sector
from .shooting import SolverOptions, default_radius, solve_profile
from .spectra import eig_lowest, weighted_correlation

__all__ = [
    "NLSParams",
    "qmax",
    "kwong_Q",
    "aplus_spectrum_check",
    "weinstein",
    "baseline_gate",
]


def qmax(dim: int) -> float:
    """Sobolev-critical exponent (N+2)/(N-2); infinite for N = 1, 2."""
    if dim < 1:
        raise ValueError(f"spatial dimension must be >= 1, got {dim}")
    if dim <= 2:
        return math.inf
    return (dim + 2.0) / (dim - 2.0)


@dataclass(frozen=True)
class NLSParams:
    """Configuration (N, q, omega) of the semilinear equation."""

    dim: int
    q: float
    omega: float
    semilinear: bool = True

    def __post_init__(self):
        lim = qmax(self.dim)
        if not (1.0 < self.q < lim):
            raise ValueError(
                f"q must lie strictly in (1, {lim}) for N={self.dim}, got {self.q}"
            )
        if not (self.omega > 0.0 and math.isfinite(self.omega)):
            raise ValueError(f"omega must be positive, got {self.omega}")

    # sector assembly and reports read the exponent generically
    @property
    def p(self) -> float:
        return self.q

    @property
    def rest_amplitude(self) -> float:
        return self.omega ** (1.0 / (self.q - 1.0))


def _closed_form_1d(params: NLSParams, grid: RadialGrid) -> GroundState:
    """Q(r) = ((q+1) omega / 2)^(1/(q-1)) sech^(2/(q-1))(sqrt(omega)(q-1)r/2),
    with analytic derivative and curvature from the equation."""
    q, omega = params.q, params.omega
    amp = ((q + 1.0) * omega / 2.0) ** (1.0 / (q - 1.0))
    root = math.sqrt(omega)
    z = 0.5 * root * (q - 1.0) * grid.r
    u = amp * np.cosh(z) ** (-2.0 / (q - 1.0))
    du = -root * np.tanh(z) * u
    ddu = omega * u - u**q
    resid = _residual_values(grid, 1, u, q, omega, quasilinear=False)
    # decay exponent fitted the same way the shooting path does
    from .shooting import _fit_tail_rate

    opts = SolverOptions()
    rel = u / amp
    above = np.nonzero(rel > opts.tail_frac)[0]
    j_m = int(above[-1]) if above.size else grid.nodes - 1
    rate = _fit_tail_rate(grid, u, j_m, amp, opts)
    return GroundState(
        params=params,
        grid=grid,
        u=GridFunction(grid, u),
        du=GridFunction(grid, du),
        ddu=GridFunction(grid, ddu),
        amplitude=amp,
        tail_rate=rate,
        resid_max=float(np.max(np.abs(resid[1:-1]))),
        bracket=(amp, amp),
        match_index=j_m,
        match_radius=float(grid.r[j_m]),
        n_shots=0,
    )


def kwong_Q(params: NLSParams, grid: RadialGrid | None = None,
            opts: SolverOptions | None = None) -> GroundState:
    """The positive radial NLS profile: closed form in dimension one,
    shooting + bisection otherwise."""
    opts = opts or SolverOptions()
    if grid is None and params.dim == 1:
        radius = opts.radius if opts.radius is not None else default_radius(params.omega, params.q)
        grid = RadialGrid(1, radius, opts.nodes)
    if params.dim == 1:
        return _closed_form_1d(params, grid)
    sol = solve_profile(params.dim, params.q, params.omega, False, opts, grid)
    return _package(params, sol, opts.resid_tol)


def aplus_spectrum_check(omega: float = 1.0, radius: float = 20.0,
                         nodes: int = 2001, tol: float = 1e-3) -> dict:
    """Poschl-Teller regression: for N=1, q=3 the baseline operator has the
    potential well -6 omega sech^2(sqrt(omega) r), whose two bound levels
    sit at omega - omega (2-n)^2, n = 0, 1, i.e. at -3 omega and 0."""
    params = NLSParams(1, 3.0, omega)
    grid = RadialGrid(1, radius, nodes)
    prof = kwong_Q(params, grid)
    even_mat = assemble_aplus(prof, 3.0, sector(1, 0))
    even = eig_lowest(even_mat, 2)
    odd = eig_lowest(assemble_aplus(prof, 3.0, sector(1, 1)), 2)
    mu1 = float(even.eigenvalues[0])
    mu2 = float(odd.eigenvalues[0])
    corr_dq = weighted_correlation(grid, odd.eigenvectors[:, 0], prof.du.values)
    q_pair = form_value(even_mat, prof.u.values)
    quadratic_expected = -2.0 * quad_values(grid, prof.u.values**4)
    ok = abs(mu1 + 3.0 * omega) < tol and abs(mu2) < tol
    return {
        "mu1": mu1,
        "mu2": mu2,
        "mu1_expected": -3.0 * omega,
        "mu2_expected": 0.0,
        "odd_evec_corr_dQ": corr_dq,
        "quadratic_form": q_pair,
        "quadratic_expected": quadratic_expected,
        "pass": bool(ok),
    }


def weinstein(f: GridFunction, q: float) -> float:
    """Scale- and dilation-invariant quotient
    |grad f|_2^((q-1)N/2) |f|_2^((N+2-(N-2)q)/2) / |f|_{q+1}^{q+1}
    with radial norms (angular factor omitted consistently)."""
    vals = f.values
    if not np.any(vals):
        raise ValueError("Weinstein quotient is undefined at f = 0")
    n = f.grid.dim
    grad2 = quad_values(f.grid, fd_derivative(f).values ** 2)
    mass = quad_values(f.grid, vals**2)
    pnorm = quad_values(f.grid, np.abs(vals) ** (q + 1.0))
    return (grad2 ** ((q - 1.0) * n / 4.0)
            * mass ** ((n + 2.0 - (n - 2.0) * q) / 4.0) / pnorm)


_GATE_CACHE: dict[float, bool] = {}


def baseline_gate(omega: float = 1.0) -> bool:
    """Fast Poschl-Teller check used to gate trust in verification verdicts."""
    key = float(omega)
    if key not in _GATE_CACHE:
        _GATE_CACHE[key] = bool(aplus_spectrum_check(omega)["pass"])
    return _GATE_CACHE[key]
