"""Spherical-harmonic sectors and symmetric assembly of the linearized
operators restricted to them.

Fields decompose as v(r) Y_k(Omega); on the degree-k sector the real-part
block of the linearization acts as

    -(1+2u^2)(v'' + (N-1)/r v' - lam_k/r^2 v) - 4 u u' v' + omega v
        - (2 u Du + D(u^2) + p u^(p-1)) v          (D = radial Laplacian)

and the imaginary-part block as

    -v'' - (N-1)/r v' + lam_k/r^2 v + omega v - (D(u^2) + u^(p-1)) v.

Assembly goes through the quadratic forms (midpoint coefficients on cells,
trapezoid for the zero-order terms), so the matrices are symmetric by
construction and consistent with the strong forms to O(h^2).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .grid import GridFunction, RadialGrid
from .ground_state import GroundState, laplacian_usq

__all__ = [
    "KIND_LPLUS",
    "KIND_LMINUS",
    "KIND_APLUS",
    "SectorIndex",
    "SectorMatrix",
    "sector",
    "assemble_lplus",
    "assemble_lminus",
    "assemble_aplus",
    "assemble_operator",
    "form_value",
    "apply_operator",
    "apply_full_linearization",
]

KIND_LPLUS = "lplus"
KIND_LMINUS = "lminus"
KIND_APLUS = "aplus"


@dataclass(frozen=True)
class SectorIndex:
    """Harmonic degree k with its angular eigenvalue and multiplicity.

    lam = k (N + k - 2); multiplicity = M_k - M_{k-2} with
    M_k = (N+k-1)! / ((N-1)! k!).  For N = 1 the sectors are the parity
    classes (k = 0 even, k = 1 odd) and lam = 0.
    """

    dim: int
    k: int
    lam: float
    multiplicity: int


def _m_count(dim: int, k: int) -> int:
    if k < 0:
        return 0
    return comb(dim + k - 1, k)


def sector(dim: int, k: int) -> SectorIndex:
    if dim < 1:
        raise ValueError(f"spatial dimension must be >= 1, got {dim}")
    if k < 0:
        raise ValueError(f"harmonic degree must be >= 0, got {k}")
    lam = float(k * (dim + k - 2))
    mult = _m_count(dim, k) - _m_count(dim, k - 2)
    return SectorIndex(dim, k, lam, mult)


@dataclass(frozen=True)
class SectorMatrix:
    """Tridiagonal realization of one sector operator in the weighted inner
    product.

    diag/offdiag/mass describe the reduced symmetric-definite pencil
    A v = mu B v on the active nodes [i0, M-1]; the boundary rows encode
    regularity at r=0 (natural for k=0, Dirichlet for k>=1) and Dirichlet at
    r=R.  For k=0 in N>=2 the r=0 node carries zero weight and is folded in
    exactly (Schur elimination); `slave` reconstructs it from the first
    active value.  kin/btil/cw retain the raw assembly so quadratic forms
    and operator applications can be evaluated on full grid functions.
    """

    kind: str
    sector: SectorIndex
    grid: RadialGrid
    diag: np.ndarray
    offdiag: np.ndarray
    mass: np.ndarray
    i0: int
    slave: float | None
    kin: np.ndarray
    btil: np.ndarray
    cw: np.ndarray

    @property
    def order(self) -> int:
        return self.diag.size


def _assemble(kind, sec, grid, a_nodes, b_nodes, c_nodes) -> SectorMatrix:
    """Build the sector matrix from the form
    int [ a (v')^2 + b v v' + c v^2 ] r^(N-1) dr."""
    n = grid.nodes
    h = grid.h
    r = grid.r
    w = grid.weights
    rmid_pow = (0.5 * (r[:-1] + r[1:])) ** (grid.dim - 1)

    a_mid = 0.5 * (a_nodes[:-1] + a_nodes[1:])
    kin = a_mid * rmid_pow / h
    if b_nodes is None:
        btil = np.zeros(n - 1)
    else:
        b_mid = 0.5 * (b_nodes[:-1] + b_nodes[1:])
        btil = b_mid * rmid_pow
    cw = c_nodes * w

    diag_full = np.empty(n)
    diag_full[1:-1] = kin[:-1] + kin[1:] + 0.5 * (btil[:-1] - btil[1:]) + cw[1:-1]
    diag_full[0] = kin[0] - 0.5 * btil[0] + cw[0]
    diag_full[-1] = kin[-1] + 0.5 * btil[-1] + cw[-1]
    off_full = -kin

    if sec.k == 0 and grid.dim == 1:
        i0, slave = 0, None
        diag = diag_full[:-1].copy()
        off = off_full[:-1].copy()
    elif sec.k == 0:
        # zero mass at the axis node: fold it into the first interior row
        i0 = 1
        slave = kin[0] / diag_full[0]
        diag = diag_full[1:-1].copy()
        diag[0] -= kin[0] ** 2 / diag_full[0]
        off = off_full[1:-1].copy()
    else:
        i0, slave = 1, None
        diag = diag_full[1:-1].copy()
        off = off_full[1:-1].copy()

    mass = w[i0:-1].copy()
    return SectorMatrix(kind, sec, grid, diag, off, mass, i0, slave, kin, btil, cw)


def _check_dims(profile, sec: SectorIndex):
    if profile.grid.dim != sec.dim:
        raise ValueError(
            f"sector dimension {sec.dim} does not match profile dimension "
            f"{profile.grid.dim}"
        )


def _angular_term(grid, lam, factor=None) -> np.ndarray:
    """lam * (factor)/r^2 sampled at nodes; the r=0 entry is only touched by
    k=0 sectors where lam vanishes, so it is zeroed."""
    out = np.zeros(grid.nodes)
    if lam != 0.0:
        rr = grid.r[1:]
        out[1:] = lam / rr**2
        if factor is not None:
            out[1:] *= factor[1:]
    return out


def assemble_lplus(gs: GroundState, sec: SectorIndex) -> SectorMatrix:
    """Real-part block on sector k, from the form
    int [ (v')^2 + 2 ((u v)')^2 + lam (1+2u^2) v^2/r^2
          + (omega - D(u^2) - p u^(p-1)) v^2 ] r^(N-1) dr."""
    _check_dims(gs, sec)
    u = gs.u.values
    du = gs.du.values
    p = gs.exponent
    omega = gs.params.omega
    a = 1.0 + 2.0 * u**2
    b = 4.0 * u * du
    c = (omega - laplacian_usq(gs) - p * u ** (p - 1.0) + 2.0 * du**2
         + _angular_term(gs.grid, sec.lam, a))
    return _assemble(KIND_LPLUS, sec, gs.grid, a, b, c)


def assemble_lminus(gs: GroundState, sec: SectorIndex) -> SectorMatrix:
    """Imaginary-part block on sector k, from the form
    int [ (v')^2 + lam v^2/r^2 + (omega - D(u^2) - u^(p-1)) v^2 ] r^(N-1) dr."""
    _check_dims(gs, sec)
    u = gs.u.values
    p = gs.exponent
    omega = gs.params.omega
    a = np.ones(gs.grid.nodes)
    c = (omega - laplacian_usq(gs) - u ** (p - 1.0)
         + _angular_term(gs.grid, sec.lam))
    return _assemble(KIND_LMINUS, sec, gs.grid, a, None, c)


def assemble_aplus(profile, q: float, sec: SectorIndex) -> SectorMatrix:
    """Semilinear baseline operator -Delta + omega - q Q^(q-1) on sector k."""
    _check_dims(profile, sec)
    qv = profile.u.values
    omega = profile.params.omega
    a = np.ones(profile.grid.nodes)
    c = omega - q * np.abs(qv) ** (q - 1.0) + _angular_term(profile.grid, sec.lam)
    return _assemble(KIND_APLUS, sec, profile.grid, a, None, c)


def assemble_operator(kind: str, profile, sec: SectorIndex) -> SectorMatrix:
    if kind == KIND_LPLUS:
        return assemble_lplus(profile, sec)
    if kind == KIND_LMINUS:
        return assemble_lminus(profile, sec)
    if kind == KIND_APLUS:
        return assemble_aplus(profile, profile.params.q, sec)
    raise ValueError(f"unknown operator kind {kind!r}")


def form_value(mat: SectorMatrix, values: np.ndarray) -> float:
    """Quadratic form Q(v) = v^T A v of the unreduced assembly on a full-grid
    vector."""
    v = np.asarray(values, dtype=float)
    dv = np.diff(v)
    kinetic = float(mat.kin @ dv**2)
    drift = 0.5 * float(mat.btil @ np.diff(v**2))
    zero_order = float(mat.cw @ v**2)
    return kinetic + drift + zero_order


def _matvec_full(mat: SectorMatrix, v: np.ndarray) -> np.ndarray:
    out = np.empty_like(v)
    kin, btil, cw = mat.kin, mat.btil, mat.cw
    out[1:-1] = (kin[:-1] * (v[1:-1] - v[:-2]) + kin[1:] * (v[1:-1] - v[2:])
                 + 0.5 * (btil[:-1] - btil[1:]) * v[1:-1] + cw[1:-1] * v[1:-1])
    out[0] = kin[0] * (v[0] - v[1]) - 0.5 * btil[0] * v[0] + cw[0] * v[0]
    out[-1] = kin[-1] * (v[-1] - v[-2]) + 0.5 * btil[-1] * v[-1] + cw[-1] * v[-1]
    return out


def apply_operator(mat: SectorMatrix, f: GridFunction) -> GridFunction:
    """Strong-form application (A v) / w at the weighted nodes; Dirichlet and
    zero-weight boundary nodes return 0."""
    if f.grid is not mat.grid and f.grid != mat.grid:
        raise ValueError("grid function does not live on the matrix grid")
    v = f.values
    av = _matvec_full(mat, v)
    w = mat.grid.weights
    out = np.zeros_like(v)
    out[1:-1] = av[1:-1] / w[1:-1]
    if mat.i0 == 0 and w[0] > 0.0:
        out[0] = av[0] / w[0]
    return GridFunction(mat.grid, out)


def apply_full_linearization(gs: GroundState, sec: SectorIndex,
                             re: GridFunction, im: GridFunction):
    """Second variation on sector k: (real block applied to Re, imaginary
    block applied to Im)."""
    lp = assemble_lplus(gs, sec)
    lm = assemble_lminus(gs, sec)
    return apply_operator(lp, re), apply_operator(lm, im)
