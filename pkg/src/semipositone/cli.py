"""Command-line front end: ``semipositone solve|sweep|barrier|verify --config C --out D``.

Exit codes: 0 success, 2 invalid configuration, 3 solver did not converge,
4 a certificate failed (artifacts are still written).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import barriers
from .model import ProblemSpec, SpecError, validate_spec
from .radialfem import MeshError, RadialFunction, RadialMesh, build_mesh
from .solvers import CertificateOptions, SolverParams, certify, geometry_probe, minimize, mountain_pass_solve, sweep_a

log = logging.getLogger("semipositone")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONCONVERGED = 3
EXIT_CERTIFICATE = 4

DEFAULT_A_GRID = (0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    spec: ProblemSpec | None
    mesh: dict = field(default_factory=dict)
    solver: SolverParams = field(default_factory=SolverParams)
    certificates: CertificateOptions = field(default_factory=CertificateOptions)
    a_grid: tuple = DEFAULT_A_GRID
    barrier: dict = field(default_factory=dict)
    profile: str | None = None

    def build_mesh(self) -> RadialMesh:
        m = {"M": 400, "R_max": 60.0, "r_core": 5.0, "growth": 1.05, "outer": "harmonic", **self.mesh}
        return build_mesh(int(m["M"]), float(m["R_max"]), float(m["r_core"]), float(m["growth"]),
                          N=self.spec.N, outer=m["outer"])


def _json(obj) -> str:
    def default(x):
        if isinstance(x, (np.floating, np.integer)):
            return x.item()
        if isinstance(x, np.bool_):
            return bool(x)
        if isinstance(x, np.ndarray):
            return x.tolist()
        raise TypeError(f"not serializable: {type(x).__name__}")

    def clean(x):
        # non-finite floats are written as strings so the output stays strict JSON
        if isinstance(x, float) and not math.isfinite(x):
            return str(x)
        if isinstance(x, dict):
            return {k: clean(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        return x

    return json.dumps(clean(json.loads(json.dumps(obj, default=default))), indent=2, sort_keys=True) + "\n"


def load_config(path: Path, seed: int | None, need_spec: bool = True) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    try:
        spec = ProblemSpec.from_dict(raw) if need_spec or "p" in raw else None
        solver = dict(raw.get("solver", {}))
        if seed is not None:
            solver["seed"] = seed
        cert = dict(raw.get("certificates", {}))
        if "decay_window" in cert:
            cert["decay_window"] = tuple(float(x) for x in cert["decay_window"])
        a_grid = tuple(float(a) for a in raw.get("a_grid", DEFAULT_A_GRID))
        if not a_grid:
            raise ConfigError("a_grid must be nonempty")
        return RunConfig(
            spec=spec,
            mesh=dict(raw.get("mesh", {})),
            solver=SolverParams(**solver),
            certificates=CertificateOptions(**cert),
            a_grid=a_grid,
            barrier=dict(raw.get("barrier", {})),
            profile=raw.get("profile"),
        )
    except (SpecError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _solve(cfg: RunConfig, mesh: RadialMesh):
    geo = geometry_probe(cfg.spec, mesh, seed=cfg.solver.seed)
    run = mountain_pass_solve if cfg.spec.regime.value == "Superlinear" else minimize
    return run(cfg.spec, mesh, cfg.solver, options=cfg.certificates, geometry=geo)


def cmd_solve(cfg: RunConfig, out: Path) -> int:
    validation = validate_spec(cfg.spec)
    mesh = cfg.build_mesh()
    rep = _solve(cfg, mesh)
    flags = rep.certificate_flags(cfg.certificates, cfg.spec.p, cfg.spec.N)
    flags["energy_bounds"] = rep.energy_bounds_ok
    doc = {
        "spec": cfg.spec.to_dict(),
        "validation": validation.to_dict(),
        "mesh": {"M": mesh.M, "R_max": mesh.R_max, "outer": mesh.outer},
        "solver": cfg.solver.to_dict(),
        "certificate_options": cfg.certificates.to_dict(),
        "result": rep.to_dict(),
        "certificates": flags,
    }
    (out / "report.json").write_text(_json(doc))
    (out / "profile.csv").write_text(rep.u.to_csv())
    if not validation.ok:
        log.error("spec fails hypothesis checks: %s", validation.passes)
        return EXIT_CONFIG
    failed = [k for k, v in flags.items() if not v]
    # a failed positivity certificate classifies the instance (shift beyond the
    # positive range), so it outranks the solver's own convergence status
    if not rep.converged and flags["positivity"]:
        log.error("solver status %s", rep.status)
        return EXIT_NONCONVERGED
    if failed:
        log.error("solver status %s; certificates failed: %s", rep.status, ", ".join(failed))
        return EXIT_CERTIFICATE
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, out: Path) -> int:
    mesh = cfg.build_mesh()
    rep = sweep_a(cfg.spec, mesh, cfg.solver, cfg.a_grid, options=cfg.certificates)
    lines = ["a,energy,norm,min_u,positive,barrier_ok"]
    for r in rep.rows:
        lines.append(f"{r['a']!r},{float(r['energy'])!r},{float(r['norm'])!r},{float(r['min_u'])!r},"
                     f"{str(r['positive']).lower()},{str(r['barrier_ok']).lower()}")
    (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    (out / "a_star.json").write_text(_json({"a_star_estimate": rep.a_star_estimate, "a_grid": list(cfg.a_grid),
                                            "spec": cfg.spec.to_dict(), "rows": rep.rows}))
    if any(r["status"] != "converged" for r in rep.rows) and rep.a_star_estimate == 0.0:
        return EXIT_NONCONVERGED
    return EXIT_OK if rep.a_star_estimate > 0.0 else EXIT_CERTIFICATE


def cmd_barrier(cfg: RunConfig, out: Path) -> int:
    b = cfg.barrier
    try:
        kind = b.get("kind", barriers.DECAY_TAIL)
        p, N, A, r = float(b["p"]), int(b["N"]), float(b["A"]), float(b["r"])
        if kind == barriers.DECAY_TAIL:
            z = barriers.barrier_z(p, N, float(b["vartheta"]), A, r)
        elif kind == barriers.HARMONIC_TAIL:
            z = barriers.barrier_zh(p, N, A, r)
        else:
            raise ConfigError(f"unknown barrier kind {kind!r}")
        if "R" in b:
            z = barriers.shift_to_zero_at(z, float(b["R"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid barrier parameters: {exc}") from exc
    check = barriers.verify_barrier(z, n=int(b.get("n", 20)), rtol=float(b.get("rtol", 1e-3)))
    doc = {"barrier": z.to_dict(), "verification": check}
    if kind == barriers.HARMONIC_TAIL:
        doc["C1"] = z.tail_coeff
    (out / "barrier.json").write_text(_json(doc))
    rho = np.concatenate([np.linspace(0.0, r, 41)[:-1], r * np.geomspace(1.0, float(b.get("R_plot", 100.0)), 81)])
    (out / "barrier.csv").write_text(z.to_csv(rho))
    return EXIT_OK if check["ok"] else EXIT_CERTIFICATE


def cmd_verify(cfg: RunConfig, out: Path, profile: Path) -> int:
    mesh = cfg.build_mesh()
    try:
        u = RadialFunction.from_csv(profile.read_text(), mesh)
    except OSError as exc:
        raise ConfigError(f"cannot read profile {profile}: {exc}") from exc
    except (MeshError, ValueError) as exc:
        raise ConfigError(f"profile does not match the mesh: {exc}") from exc
    c = certify(u, cfg.spec, cfg.certificates)
    tol = cfg.solver.tol_residual
    target = (cfg.spec.p - cfg.spec.N) / (cfg.spec.p - 1.0)
    flags = {
        "criticality": c["criticality"].max_violation <= tol,
        "nonnegative": c["min_value"] >= -tol,
        "subsolution": c["sub_margin"] >= -tol,
        "supersolution": c["sup_margin"] >= -tol,
        "positivity": c["barrier_ok"],
        "hopf": c["hopf_ok"],
        "decay": bool(math.isfinite(c["decay_slope"])
                      and abs(c["decay_slope"] - target) <= cfg.certificates.decay_slope_tol),
    }
    c["criticality"] = c["criticality"].to_dict()
    (out / "verify.json").write_text(_json({"spec": cfg.spec.to_dict(), "profile": str(profile),
                                            "result": c, "certificates": flags}))
    failed = [k for k, v in flags.items() if not v]
    if failed:
        log.error("certificates failed: %s", ", ".join(failed))
        return EXIT_CERTIFICATE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="semipositone", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in [("solve", "compute and certify one critical point"),
                        ("sweep", "solve along a grid of shifts a and estimate a*"),
                        ("barrier", "construct and verify a closed-form barrier"),
                        ("verify", "re-certify a stored profile")]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", required=True, type=Path)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "verify":
            p.add_argument("--profile", type=Path, default=None,
                           help="profile CSV (default: config 'profile' key, else <out>/profile.csv)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.seed, need_spec=args.command != "barrier")
        args.out.mkdir(parents=True, exist_ok=True)
        if args.command == "solve":
            return cmd_solve(cfg, args.out)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.out)
        if args.command == "barrier":
            return cmd_barrier(cfg, args.out)
        profile = args.profile or (Path(cfg.profile) if cfg.profile else args.out / "profile.csv")
        return cmd_verify(cfg, args.out, profile)
    except (ConfigError, SpecError, MeshError, barriers.BarrierError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
