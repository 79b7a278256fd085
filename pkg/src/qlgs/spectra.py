"""Eigensolution of the sector pencils, kernel detection with two-grid
Richardson extrapolation, and discrete-vs-continuum classification by box
doubling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .grid import RadialGrid
from .ground_state import extend_profile, restrict_profile
from .sectors import SectorIndex, SectorMatrix, assemble_operator, sector

__all__ = [
    "EigenError",
    "SpectrumSlice",
    "KernelVerdict",
    "ContinuumProbe",
    "eig_lowest",
    "default_kernel_tol",
    "kernel_from_slices",
    "kernel_dimension",
    "probe_from_slices",
    "continuum_probe",
    "weighted_correlation",
    "write_sector_csv",
]


class EigenError(RuntimeError):
    """Eigensolver failure, tagged with sector and grid metadata."""


@dataclass(frozen=True)
class SpectrumSlice:
    """Lowest eigenpairs of one sector; eigenvectors are full-grid columns,
    orthonormal in the r^(N-1) dr inner product."""

    kind: str
    sector: SectorIndex
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    h: float
    R: float
    grid: RadialGrid


@dataclass(frozen=True)
class KernelVerdict:
    """Near-zero eigenvalue count for one sector, extrapolated over (h, h/2)
    at fixed R.  `inconclusive` is raised instead of guessing whenever the
    two grids disagree about which eigenvalues sit in the kernel band."""

    kind: str
    k: int
    raw_nearest_zero: float
    extrapolated: float
    dimension: int
    tol_kernel: float
    inconclusive: bool
    eigenvector: np.ndarray
    eigenvalues_fine: np.ndarray
    eigenvalues_coarse: np.ndarray
    eigenvalues_extrapolated: np.ndarray


@dataclass(frozen=True)
class ContinuumProbe:
    """Classification of one sector's lowest eigenvalues under R -> 2R at
    matched h: those that do not move are discrete, the rest belong to the
    discretized continuum."""

    kind: str
    k: int
    eigenvalues: np.ndarray
    shifts: np.ndarray
    stable: np.ndarray
    drifting: np.ndarray
    threshold_ok: bool
    tol_stable: float


def eig_lowest(matrix: SectorMatrix, m: int) -> SpectrumSlice:
    """Lowest m eigenpairs of A v = mu B v, folded to a standard symmetric
    tridiagonal problem by the diagonal square-root similarity."""
    n = matrix.order
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= {n}, got {m}")
    s = np.sqrt(matrix.mass)
    d = matrix.diag / matrix.mass
    e = matrix.offdiag[: n - 1] / (s[:-1] * s[1:])
    try:
        vals, z = eigh_tridiagonal(d, e, select="i", select_range=(0, m - 1))
    except Exception as exc:  # pragma: no cover - backstop for LAPACK failures
        raise EigenError(
            f"eigensolve failed for {matrix.kind} k={matrix.sector.k} "
            f"(h={matrix.grid.h:.3e}, R={matrix.grid.radius})"
        ) from exc
    vecs_active = z / s[:, None]
    full = np.zeros((matrix.grid.nodes, m))
    full[matrix.i0 : matrix.i0 + n, :] = vecs_active
    if matrix.slave is not None:
        full[0, :] = matrix.slave * vecs_active[0, :]
    return SpectrumSlice(
        kind=matrix.kind,
        sector=matrix.sector,
        eigenvalues=vals,
        eigenvectors=full,
        h=matrix.grid.h,
        R=matrix.grid.radius,
        grid=matrix.grid,
    )


def default_kernel_tol(h_coarse: float, omega: float) -> float:
    """Kernel band half-width: separates O(h^2) zero-mode drift from O(1)
    spectral gaps by a comfortable margin."""
    return 50.0 * h_coarse**2 * max(omega, 1.0)


def _kernel_consistency(fine, coarse, extrap, tol) -> bool:
    """True when both grids tell the same kernel story: eigenvalue pairing is
    tight relative to scale, the kernel band membership agrees between the
    fine values and the extrapolated ones, and extrapolation actually
    collapses every counted member (a stable nonzero eigenvalue inside the
    band means the band is too wide to conclude anything)."""
    fine = np.asarray(fine)
    coarse = np.asarray(coarse)
    extrap = np.asarray(extrap)
    pair_guard = 0.25 * np.maximum(1.0, np.abs(fine))
    if np.any(np.abs(coarse - fine) > pair_guard):
        return False
    if not np.all((np.abs(fine) < tol) == (np.abs(extrap) < tol)):
        return False
    in_band = np.abs(extrap) < tol
    unshrunk = in_band & (np.abs(extrap) > 0.25 * np.abs(fine)) \
        & (np.abs(fine) > 1e-3 * tol)
    return not bool(np.any(unshrunk))


def weighted_correlation(grid: RadialGrid, a: np.ndarray, b: np.ndarray) -> float:
    w = grid.weights
    na = np.sqrt(w @ (a * a))
    nb = np.sqrt(w @ (b * b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(abs(w @ (a * b)) / (na * nb))


def kernel_from_slices(slice_f: SpectrumSlice, slice_c: SpectrumSlice,
                       tol_kernel: float) -> KernelVerdict:
    """Kernel verdict from matching fine/coarse slices at identical R."""
    mu_f = slice_f.eigenvalues
    mu_c = slice_c.eigenvalues
    extrap = (4.0 * mu_f - mu_c) / 3.0
    ok = _kernel_consistency(mu_f, mu_c, extrap, tol_kernel)
    dim = int(np.count_nonzero(np.abs(extrap) < tol_kernel))
    i_near = int(np.argmin(np.abs(extrap)))
    return KernelVerdict(
        kind=slice_f.kind,
        k=slice_f.sector.k,
        raw_nearest_zero=float(mu_f[i_near]),
        extrapolated=float(extrap[i_near]),
        dimension=dim,
        tol_kernel=tol_kernel,
        inconclusive=not ok,
        eigenvector=slice_f.eigenvectors[:, i_near],
        eigenvalues_fine=mu_f,
        eigenvalues_coarse=mu_c,
        eigenvalues_extrapolated=extrap,
    )


def kernel_dimension(gs, kind: str, k: int, tol_kernel: float | None = None,
                     m: int = 6) -> KernelVerdict:
    """Count extrapolated near-zero eigenvalues of one sector operator.

    gs supplies the fine grid; the coarse companion is its exact restriction
    to every other node (same R), and eigenvalues extrapolate as
    (4 mu_fine - mu_coarse) / 3."""
    coarse = restrict_profile(gs, 2)
    sec = sector(gs.grid.dim, k)
    slice_f = eig_lowest(assemble_operator(kind, gs, sec), m)
    slice_c = eig_lowest(assemble_operator(kind, coarse, sec), m)
    tol = tol_kernel if tol_kernel is not None else default_kernel_tol(
        coarse.grid.h, gs.params.omega)
    return kernel_from_slices(slice_f, slice_c, tol)


def probe_from_slices(base: SpectrumSlice, wide: SpectrumSlice, omega: float,
                      tol_stable: float = 1e-4,
                      tol_edge: float = 0.05) -> ContinuumProbe:
    """Classification from matching (R, 2R) slices at identical h."""
    shifts = np.array([
        float(np.min(np.abs(wide.eigenvalues - mu))) for mu in base.eigenvalues
    ])
    is_stable = shifts < tol_stable
    stable = base.eigenvalues[is_stable]
    drifting = base.eigenvalues[~is_stable]
    threshold_ok = bool(drifting.size == 0 or float(np.min(drifting)) >= omega - tol_edge)
    return ContinuumProbe(
        kind=base.kind,
        k=base.sector.k,
        eigenvalues=base.eigenvalues,
        shifts=shifts,
        stable=stable,
        drifting=drifting,
        threshold_ok=threshold_ok,
        tol_stable=tol_stable,
    )


def continuum_probe(gs, kind: str, k: int, m: int = 8,
                    tol_stable: float = 1e-4,
                    tol_edge: float = 0.05) -> ContinuumProbe:
    """Box-doubling probe: eigenvalues that survive R -> 2R unchanged are
    discrete; the drifting cluster is the discretized continuum, whose
    minimum should not undercut omega - tol_edge."""
    sec = sector(gs.grid.dim, k)
    base = eig_lowest(assemble_operator(kind, gs, sec), m)
    wide_gs = extend_profile(gs, 2)
    wide = eig_lowest(assemble_operator(kind, wide_gs, sec), max(2 * m, m + 4))
    return probe_from_slices(base, wide, gs.params.omega, tol_stable, tol_edge)


def write_sector_csv(probe: ContinuumProbe, path) -> None:
    """Per-sector CSV `index,eigenvalue,shift_under_R_doubling,classification`."""
    with open(path, "w", newline="") as f:
        f.write("index,eigenvalue,shift_under_R_doubling,classification\n")
        for i, (mu, sh) in enumerate(zip(probe.eigenvalues, probe.shifts)):
            cls = "discrete" if sh < probe.tol_stable else "drifting"
            f.write(f"{i},{float(mu)!r},{float(sh)!r},{cls}\n")
