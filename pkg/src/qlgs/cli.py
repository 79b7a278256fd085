"""Command-line front end: single solves, verification runs, parameter
sweeps, and the semilinear baseline battery.

Exit codes: 0 when every verdict passes, 2 when any verdict is inconclusive,
1 on failure (failed verdict, bad configuration, or a solver error).  All
emitted numbers are lossless decimal text, and identical configurations
produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .ground_state import (
    Params,
    SolveError,
    SolverOptions,
    find_ground_state,
    identity_residuals,
    pmax,
    write_profile_csv,
)
from .nls import NLSParams, aplus_spectrum_check, kwong_Q, weinstein
from .nondegeneracy import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    NondegeneracyReport,
    VerifyOptions,
    report_to_json,
    verify,
)
from .spectra import write_sector_csv

__all__ = ["RunConfig", "ConfigError", "parse_config", "run", "main"]


class ConfigError(ValueError):
    """Invalid flags or configuration file."""


@dataclass(frozen=True)
class RunConfig:
    mode: str
    dim: int = 2
    p_values: tuple[float, ...] = (2.0,)
    omega: float = 1.0
    radius: float | None = None
    nodes: int | None = None
    sectors: int = 3
    tol_kernel: float | None = None
    out: Path = Path("qlgs-out")
    jobs: int = 1

    @property
    def p(self) -> float:
        return self.p_values[0]


_CONFIG_KEYS = {
    "dim": int,
    "p": str,
    "omega": float,
    "radius": float,
    "nodes": int,
    "sectors": int,
    "tol_kernel": float,
    "out": str,
    "jobs": int,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep the 0/1/2 exit contract
        raise ConfigError(message)


def _parse_p(text: str) -> tuple[float, ...]:
    """Scalar, comma list, or inclusive `start:step:stop` range."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"bad p range {text!r}, expected start:step:stop")
        start, step, stop = (float(x) for x in parts)
        if step <= 0 or stop < start:
            raise ConfigError(f"bad p range {text!r}")
        values = []
        x = start
        while x <= stop + 1e-9 * step:
            values.append(round(x, 12))
            x += step
        return tuple(values)
    if "," in text:
        return tuple(float(x) for x in text.split(",") if x.strip())
    return (float(text),)


def _read_config_file(path: str) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected `key = value`")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}")
    return out


def parse_config(argv) -> RunConfig:
    parser = _Parser(prog="qlgs", description=__doc__)
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in ("solve", "verify", "sweep", "baseline"):
        sp = sub.add_parser(mode)
        sp.add_argument("--dim", type=int)
        sp.add_argument("--p", type=str)
        sp.add_argument("--omega", type=float)
        sp.add_argument("--radius", type=float)
        sp.add_argument("--nodes", type=int)
        sp.add_argument("--sectors", type=int)
        sp.add_argument("--tol-kernel", dest="tol_kernel", type=float)
        sp.add_argument("--out", type=str)
        sp.add_argument("--jobs", type=int)
        sp.add_argument("--config", type=str)

    ns = parser.parse_args(argv)
    merged: dict = {}
    if ns.config:
        merged.update(_read_config_file(ns.config))
    for key in _CONFIG_KEYS:
        flag = getattr(ns, key, None)
        if flag is not None:
            merged[key] = flag

    cfg = RunConfig(
        mode=ns.mode,
        dim=int(merged.get("dim", 2)),
        p_values=_parse_p(str(merged.get("p", "2.0"))),
        omega=float(merged.get("omega", 1.0)),
        radius=float(merged["radius"]) if "radius" in merged else None,
        nodes=int(merged["nodes"]) if "nodes" in merged else None,
        sectors=int(merged.get("sectors", 3)),
        tol_kernel=float(merged["tol_kernel"]) if "tol_kernel" in merged else None,
        out=Path(merged.get("out", "qlgs-out")),
        jobs=int(merged.get("jobs", 1)),
    )
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if not cfg.p_values:
        raise ConfigError("parameter range is empty")
    if cfg.mode != "sweep" and len(cfg.p_values) > 1:
        raise ConfigError("a p range needs sweep mode")
    if cfg.mode != "baseline":
        lim = pmax(cfg.dim)
        for p in cfg.p_values:
            if not (1.0 < p < lim):
                raise ConfigError(
                    f"p={p} out of range: need 1 < p < {lim} for N={cfg.dim}"
                )
    if cfg.omega <= 0:
        raise ConfigError(f"omega must be positive, got {cfg.omega}")
    if cfg.sectors < 2:
        raise ConfigError(f"need at least 2 sectors, got {cfg.sectors}")
    if cfg.nodes is not None:
        if cfg.nodes < 17:
            raise ConfigError(f"need at least 17 nodes, got {cfg.nodes}")
        if cfg.mode in ("verify", "sweep") and (cfg.nodes - 1) % 2:
            raise ConfigError("verification needs an even cell count (odd --nodes)")
    if cfg.tol_kernel is not None and cfg.tol_kernel <= 0:
        raise ConfigError("tolerances must be positive")
    if cfg.radius is not None and cfg.radius <= 0:
        raise ConfigError(f"radius must be positive, got {cfg.radius}")
    if cfg.jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {cfg.jobs}")


def _solver_options(cfg: RunConfig) -> SolverOptions:
    return SolverOptions(radius=cfg.radius, nodes=cfg.nodes or 3001)


def _verify_options(cfg: RunConfig) -> VerifyOptions:
    return VerifyOptions(
        solver=_solver_options(cfg),
        sectors=cfg.sectors,
        tol_kernel=cfg.tol_kernel,
    )


def _json_dump(obj: dict, path: Path):
    path.write_text(json.dumps(obj, indent=2) + "\n")


def _write_verify_outputs(report: NondegeneracyReport, out: Path):
    out.mkdir(parents=True, exist_ok=True)
    gs = report.artifacts["gs"]
    write_profile_csv(gs, out / "profile.csv")
    for k, probe in zip(range(len(report.continuum_ok["lplus"])),
                        report.artifacts["probes"]["lplus"]):
        write_sector_csv(probe, out / f"eigen_k{k}.csv")
    (out / "report.json").write_text(report_to_json(report))


def _run_verify_one(cfg: RunConfig, p: float, out: Path) -> str:
    params = Params(cfg.dim, p, cfg.omega)
    report = verify(params, _verify_options(cfg))
    _write_verify_outputs(report, out)
    return report.nd_verdict


def _sweep_worker(args):
    cfg_dict, p, out = args
    cfg = RunConfig(**cfg_dict)
    try:
        verdict = _run_verify_one(cfg, p, Path(out))
    except SolveError as exc:
        return p, FAIL, str(exc)
    report_path = Path(out) / "report.json"
    report = json.loads(report_path.read_text())
    return p, verdict, report


def _mode_solve(cfg: RunConfig) -> int:
    params = Params(cfg.dim, cfg.p, cfg.omega)
    gs = find_ground_state(params, _solver_options(cfg))
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_profile_csv(gs, cfg.out / "profile.csv")
    res = identity_residuals(gs)
    _json_dump(
        {
            "params": {"dim": params.dim, "p": params.p, "omega": params.omega},
            "grid": {"radius": gs.grid.radius, "nodes": gs.grid.nodes, "h": gs.grid.h},
            "residuals": res,
            "kernel_dims": None,
            "mu1": None,
            "gap": None,
            "sign_constant": None,
            "continuum_ok": None,
            "nd_verdict": None,
            "extras": {
                "amplitude": gs.amplitude,
                "tail_rate": gs.tail_rate,
                "resid_max": gs.resid_max,
                "bracket": list(gs.bracket),
                "match_radius": gs.match_radius,
                "n_shots": gs.n_shots,
            },
        },
        cfg.out / "report.json",
    )
    return 0


def _mode_verify(cfg: RunConfig) -> int:
    verdict = _run_verify_one(cfg, cfg.p, cfg.out)
    return {PASS: 0, INCONCLUSIVE: 2}.get(verdict, 1)


def _mode_sweep(cfg: RunConfig) -> int:
    cfg.out.mkdir(parents=True, exist_ok=True)
    tasks = []
    for p in cfg.p_values:
        sub = cfg.out / f"p{p!r}"
        cfg_dict = {
            "mode": "verify",
            "dim": cfg.dim,
            "p_values": (p,),
            "omega": cfg.omega,
            "radius": cfg.radius,
            "nodes": cfg.nodes,
            "sectors": cfg.sectors,
            "tol_kernel": cfg.tol_kernel,
            "out": sub,
            "jobs": 1,
        }
        tasks.append((cfg_dict, p, str(sub)))

    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_sweep_worker, tasks))
    else:
        rows = [_sweep_worker(t) for t in tasks]

    verdicts = []
    with open(cfg.out / "summary.csv", "w", newline="") as f:
        f.write("dim,p,omega,mu1,lplus_dims,lminus_dims,nd_verdict\n")
        for p, verdict, report in rows:
            verdicts.append(verdict)
            if isinstance(report, dict):
                mu1 = repr(report["mu1"])
                dp = ";".join(str(d) for d in report["kernel_dims"]["lplus"])
                dm = ";".join(str(d) for d in report["kernel_dims"]["lminus"])
            else:  # solver failure: record the row, no spectra
                mu1, dp, dm = "", "", ""
            f.write(f"{cfg.dim},{p!r},{cfg.omega!r},{mu1},{dp},{dm},{verdict}\n")

    if any(v == FAIL for v in verdicts):
        return 1
    if any(v == INCONCLUSIVE for v in verdicts):
        return 2
    return 0


def _mode_baseline(cfg: RunConfig) -> int:
    radius = cfg.radius if cfg.radius is not None else 20.0
    nodes = cfg.nodes if cfg.nodes is not None else 2001
    check = aplus_spectrum_check(cfg.omega, radius=radius, nodes=nodes)
    params = NLSParams(1, 3.0, cfg.omega)
    from .grid import RadialGrid
    from .spectra import continuum_probe

    grid = RadialGrid(1, radius, nodes)
    prof = kwong_Q(params, grid)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_profile_csv(prof, cfg.out / "profile.csv")
    for k in (0, 1):
        probe = continuum_probe(prof, "aplus", k)
        write_sector_csv(probe, cfg.out / f"eigen_k{k}.csv")
    w_q = weinstein(prof.u, 3.0)
    _json_dump(
        {
            "kind": "nls_baseline",
            "params": {"dim": 1, "q": 3.0, "omega": cfg.omega},
            "grid": {"radius": radius, "nodes": nodes, "h": grid.h},
            "residuals": {"equation": prof.resid_max},
            "kernel_dims": None,
            "mu1": check["mu1"],
            "mu2": check["mu2"],
            "gap": check["mu2"] - check["mu1"],
            "sign_constant": None,
            "continuum_ok": None,
            "nd_verdict": check["pass"],
            "extras": {
                "mu1_expected": check["mu1_expected"],
                "mu2_expected": check["mu2_expected"],
                "odd_evec_corr_dQ": check["odd_evec_corr_dQ"],
                "quadratic_form": check["quadratic_form"],
                "quadratic_expected": check["quadratic_expected"],
                "weinstein": w_q,
                "amplitude": prof.amplitude,
                "tail_rate": prof.tail_rate,
            },
        },
        cfg.out / "report.json",
    )
    return 0 if check["pass"] else 1


def run(cfg: RunConfig) -> int:
    try:
        if cfg.mode == "solve":
            return _mode_solve(cfg)
        if cfg.mode == "verify":
            return _mode_verify(cfg)
        if cfg.mode == "sweep":
            return _mode_sweep(cfg)
        if cfg.mode == "baseline":
            return _mode_baseline(cfg)
        raise ConfigError(f"unknown mode {cfg.mode!r}")
    except SolveError as exc:
        print(f"qlgs: solver failure: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"qlgs: {exc}", file=sys.stderr)
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
