"""Full verification pipeline for one configuration.

Nondegeneracy of the ground state reduces, sector by sector, to checkable
spectral facts: the real-part block has kernel only in the degree-1 sector
(spanned by u', carried with geometric multiplicity N), the imaginary-part
block only in the radial sector (spanned by u), the lowest eigenvalue is
negative and simple with a sign-constant eigenvector, and the discretized
continuum stays above omega.  verify() runs all of it and aggregates a
three-valued verdict: pass / fail / inconclusive.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .grid import GridFunction
from .ground_state import (
    GroundState,
    Params,
    SolverOptions,
    energy_terms,
    extend_profile,
    find_ground_state,
    identity_residuals,
    restrict_profile,
)
from .nls import baseline_gate
from .sectors import (
    KIND_LMINUS,
    KIND_LPLUS,
    assemble_operator,
    form_value,
    sector,
)
from .spectra import (
    SpectrumSlice,
    default_kernel_tol,
    eig_lowest,
    kernel_from_slices,
    probe_from_slices,
    weighted_correlation,
)

__all__ = [
    "SignChanges",
    "VerifyOptions",
    "FirstEigenpair",
    "NondegeneracyReport",
    "sign_changes",
    "first_eigenpair_check",
    "orthogonality_audit",
    "verify",
    "report_to_json",
]

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


class SignChanges(NamedTuple):
    count: int
    degenerate: bool


def sign_changes(v, floor_frac: float = 1e-5) -> SignChanges:
    """Strict sign alternations among nodes with |v| above the noise floor
    floor_frac * max|v|.  Identically-zero input is flagged degenerate."""
    if not 0.0 < floor_frac <= 0.1:
        raise ValueError(f"floor_frac must lie in (0, 0.1], got {floor_frac}")
    vals = v.values if isinstance(v, GridFunction) else np.asarray(v, dtype=float)
    peak = float(np.max(np.abs(vals))) if vals.size else 0.0
    if peak == 0.0:
        return SignChanges(0, True)
    kept = vals[np.abs(vals) > floor_frac * peak]
    s = np.sign(kept)
    return SignChanges(int(np.count_nonzero(s[1:] != s[:-1])), False)


@dataclass(frozen=True)
class FirstEigenpair:
    mu1: float
    gap: float
    sign_constant: bool
    negative: bool
    sector_k: int


def first_eigenpair_check(slices: dict[int, SpectrumSlice],
                          floor_frac: float = 1e-5) -> FirstEigenpair:
    """Global minimum over the sector slices, its distance to the next
    distinct eigenvalue, and whether its eigenvector is one-signed.  A
    configuration without a negative ground eigenvalue is flagged (the
    operator then has no well and the check does not apply)."""
    dims = {sl.grid.dim for sl in slices.values()}
    need = 2 if dims == {1} else 3  # dimension one has only the parity classes
    if len(slices) < need:
        raise ValueError(f"need at least sectors k = 0..{need - 1}")
    pooled = []
    for k, sl in slices.items():
        for i, mu in enumerate(sl.eigenvalues):
            pooled.append((float(mu), k, i))
    pooled.sort()
    mu1, k1, i1 = pooled[0]
    distinct_tol = 1e-9 * max(1.0, abs(mu1))
    gap = 0.0
    for mu, _, _ in pooled[1:]:
        if mu > mu1 + distinct_tol:
            gap = mu - mu1
            break
    vec = slices[k1].eigenvectors[:, i1]
    sc = sign_changes(vec, floor_frac)
    return FirstEigenpair(
        mu1=mu1,
        gap=gap,
        sign_constant=bool(sc.count == 0 and not sc.degenerate),
        negative=bool(mu1 < 0.0),
        sector_k=k1,
    )


def orthogonality_audit(sl: SpectrumSlice) -> float:
    """Largest off-diagonal weighted inner product among the returned
    eigenvectors; vacuously zero for a single pair."""
    m = sl.eigenvalues.size
    if m < 2:
        return 0.0
    gram = sl.eigenvectors.T @ (sl.grid.weights[:, None] * sl.eigenvectors)
    return float(np.max(np.abs(gram - np.diag(np.diag(gram)))))


@dataclass(frozen=True)
class VerifyOptions:
    """Pipeline settings; grid defaults follow the solver."""

    solver: SolverOptions = field(default_factory=SolverOptions)
    sectors: int = 3
    m_eigs: int = 6
    probe_m: int = 8
    tol_kernel: float | None = None
    tol_stable: float = 1e-4
    tol_edge: float = 0.05
    floor_frac: float = 1e-5
    use_baseline_gate: bool = True
    workers: int = 4


@dataclass
class NondegeneracyReport:
    """Everything the verdict rests on, plus the verdict itself."""

    params: Params
    grid_meta: dict
    residuals: dict
    kernel_dims: dict
    mu1: float
    gap: float
    sign_constant: bool
    continuum_ok: dict
    nd_verdict: str
    total_kernel_count: int
    extras: dict
    artifacts: dict = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        verdict = {PASS: True, FAIL: False}.get(self.nd_verdict, INCONCLUSIVE)
        return {
            "params": {
                "dim": self.params.dim,
                "p": self.params.p,
                "omega": self.params.omega,
            },
            "grid": self.grid_meta,
            "residuals": self.residuals,
            "kernel_dims": self.kernel_dims,
            "mu1": self.mu1,
            "gap": self.gap,
            "sign_constant": self.sign_constant,
            "continuum_ok": self.continuum_ok,
            "nd_verdict": verdict,
            "extras": self.extras,
        }


def report_to_json(report: NondegeneracyReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def _expected_dims(dim: int, ks: list[int]) -> tuple[list[int], list[int]]:
    lplus = [1 if k == 1 else 0 for k in ks]
    lminus = [1 if k == 0 else 0 for k in ks]
    return lplus, lminus


def _head(sl: SpectrumSlice, m: int) -> SpectrumSlice:
    if m >= sl.eigenvalues.size:
        return sl
    return SpectrumSlice(sl.kind, sl.sector, sl.eigenvalues[:m],
                         sl.eigenvectors[:, :m], sl.h, sl.R, sl.grid)


def verify(params: Params, opts: VerifyOptions | None = None,
           gs: GroundState | None = None) -> NondegeneracyReport:
    """Solve, assemble sectors k = 0..K for both blocks, and run the kernel,
    first-eigenvalue, and continuum checks at (h, h/2) and (R, 2R)."""
    opts = opts or VerifyOptions()
    if gs is None:
        gs = find_ground_state(params, opts.solver)
    if (gs.grid.nodes - 1) % 2:
        raise ValueError("verification needs an even cell count for h -> h/2")

    n_dim = params.dim
    k_top = min(opts.sectors, 1) if n_dim == 1 else opts.sectors
    ks = list(range(k_top + 1))
    coarse = restrict_profile(gs, 2)
    wide = extend_profile(gs, 2)
    tol_kernel = opts.tol_kernel if opts.tol_kernel is not None else \
        default_kernel_tol(coarse.grid.h, params.omega)

    def task(job):
        kind, k = job
        sec = sector(n_dim, k)
        sp = eig_lowest(assemble_operator(kind, gs, sec),
                        max(opts.m_eigs, opts.probe_m))
        sf = _head(sp, opts.m_eigs)
        sc = eig_lowest(assemble_operator(kind, coarse, sec), opts.m_eigs)
        sw = eig_lowest(assemble_operator(kind, wide, sec),
                        max(2 * opts.probe_m, opts.probe_m + 4))
        kv = kernel_from_slices(sf, sc, tol_kernel)
        pr = probe_from_slices(_head(sp, opts.probe_m), sw, params.omega,
                               opts.tol_stable, opts.tol_edge)
        return kind, k, sf, kv, pr

    jobs = [(kind, k) for kind in (KIND_LPLUS, KIND_LMINUS) for k in ks]
    results: dict[tuple[str, int], tuple] = {}
    if opts.workers > 1:
        with ThreadPoolExecutor(max_workers=opts.workers) as pool:
            for kind, k, sf, kv, pr in pool.map(task, jobs):
                results[(kind, k)] = (sf, kv, pr)
    else:
        for job in jobs:
            kind, k, sf, kv, pr = task(job)
            results[(kind, k)] = (sf, kv, pr)

    slices_plus = {k: results[(KIND_LPLUS, k)][0] for k in ks}
    verdicts = {kind: [results[(kind, k)][1] for k in ks]
                for kind in (KIND_LPLUS, KIND_LMINUS)}
    probes = {kind: [results[(kind, k)][2] for k in ks]
              for kind in (KIND_LPLUS, KIND_LMINUS)}

    dims_plus = [kv.dimension for kv in verdicts[KIND_LPLUS]]
    dims_minus = [kv.dimension for kv in verdicts[KIND_LMINUS]]
    any_inconclusive = any(kv.inconclusive for vs in verdicts.values() for kv in vs)

    first = first_eigenpair_check(slices_plus, opts.floor_frac)

    # identity and quadratic-form defects
    t = energy_terms(gs)
    p = params.p
    res = identity_residuals(gs)
    lp0 = assemble_operator(KIND_LPLUS, gs, sector(n_dim, 0))
    form_u = form_value(lp0, gs.u.values)
    witness = 8.0 * t["quasilinear"] - (p - 1.0) * t["power"]

    def rel(a, b):
        d = max(abs(a), abs(b))
        return abs(a - b) / d if d else 0.0

    residuals = {
        "virial": res["virial"],
        "pohozaev2d": res["pohozaev2d"],
        "lplus_form": rel(form_u, witness),
        "form2d": None,
    }
    if n_dim == 2:
        closed = -2.0 * t["gradient"] - (p - 1.0) ** 2 / (p + 1.0) * t["power"]
        residuals["form2d"] = rel(form_u, closed)

    # correlation of the detected kernel vectors with the analytic ones
    kv_p1 = verdicts[KIND_LPLUS][1] if len(ks) > 1 else None
    kv_m0 = verdicts[KIND_LMINUS][0]
    corr_du = weighted_correlation(gs.grid, kv_p1.eigenvector, gs.du.values) \
        if kv_p1 is not None else 0.0
    corr_u = weighted_correlation(gs.grid, kv_m0.eigenvector, gs.u.values)

    continuum_ok = {
        KIND_LPLUS: [pr.threshold_ok for pr in probes[KIND_LPLUS]],
        KIND_LMINUS: [pr.threshold_ok for pr in probes[KIND_LMINUS]],
    }
    all_continuum = all(continuum_ok[KIND_LPLUS]) and all(continuum_ok[KIND_LMINUS])

    exp_plus, exp_minus = _expected_dims(n_dim, ks)
    mult1 = sector(n_dim, 1).multiplicity
    total_kernel = dims_minus[0] + mult1 * (dims_plus[1] if len(ks) > 1 else 0)

    baseline_ok = baseline_gate() if opts.use_baseline_gate else True

    structure_ok = (dims_plus == exp_plus and dims_minus == exp_minus
                    and first.negative and first.sign_constant
                    and first.gap > 0.0 and all_continuum)
    if not baseline_ok or any_inconclusive:
        verdict = INCONCLUSIVE
    elif structure_ok:
        verdict = PASS
    else:
        verdict = FAIL

    pooled_plus = np.sort(np.concatenate(
        [sl.eigenvalues for sl in slices_plus.values()]))
    zero_position = int(np.count_nonzero(pooled_plus < -tol_kernel))

    grid_meta = {
        "radius": gs.grid.radius,
        "nodes": gs.grid.nodes,
        "h": gs.grid.h,
        "coarse_nodes": coarse.grid.nodes,
        "sectors": k_top,
        "tol_kernel": tol_kernel,
    }
    extras = {
        "amplitude": gs.amplitude,
        "tail_rate": gs.tail_rate,
        "resid_max": gs.resid_max,
        "bracket": list(gs.bracket),
        "match_radius": gs.match_radius,
        "total_kernel_count": total_kernel,
        "expected_kernel_count": 1 + mult1,
        "mu1_sector": first.sector_k,
        "zero_position": zero_position,
        "kernel_corr_lplus_k1_du": corr_du,
        "kernel_corr_lminus_k0_u": corr_u,
        "lplus_form_value": form_u,
        "baseline_ok": baseline_ok,
        "kernel_inconclusive": any_inconclusive,
    }
    return NondegeneracyReport(
        params=params,
        grid_meta=grid_meta,
        residuals=residuals,
        kernel_dims={"lplus": dims_plus, "lminus": dims_minus},
        mu1=first.mu1,
        gap=first.gap,
        sign_constant=first.sign_constant,
        continuum_ok=continuum_ok,
        nd_verdict=verdict,
        total_kernel_count=total_kernel,
        extras=extras,
        artifacts={
            "gs": gs,
            "slices_lplus": slices_plus,
            "verdicts": verdicts,
            "probes": probes,
            "first": first,
        },
    )
