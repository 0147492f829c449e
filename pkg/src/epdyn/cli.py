"""Command-line surface: JSON scenario configs in, CSV/JSON artifacts out.

Subcommands map one-to-one onto tasks::

    epdyn spectrum-sweep config.json [--seed N] [--rank-tol X]
                                     [--cluster-tol X] [--out PATH]
    epdyn petermann-sweep | pcr-check | evolve | density-evolve
          | transfer | eliminate-compare ...

A config is a JSON document (see ``CONFIG_KEYS``); CLI flags override the
corresponding config entries.  Every artifact embeds a header with the
tool version, a hash of the fully resolved ("effective") config, and the
tolerances in force; the effective config itself is written next to the
artifact and re-runs to byte-identical output.  Exit codes: 0 ok,
2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, jordan, linalg
from .adiabatic import (
    AdiabaticDiamondConfig,
    AdiabaticStubConfig,
    build_full,
    compare_full_vs_effective,
)
from .diagnostics import (
    density_evolve,
    entanglement_transfer_fidelities,
    mixed_ensemble_series,
    petermann,
)
from .exceptions import EpdynError
from .models.diamond import DiamondRingParams, build_diamond
from .models.stub import StubRibbonParams, build_stub, site_labels
from .pcr import build_pcr
from .propagator import evolve_closed_form, plan

TASKS = (
    "spectrum-sweep",
    "petermann-sweep",
    "pcr-check",
    "evolve",
    "density-evolve",
    "transfer",
    "eliminate-compare",
)
MODELS = ("stub", "diamond", "adiabatic-stub", "adiabatic-diamond", "matrix-file")
SCHEMA_VERSION = 1

CONFIG_KEYS = {
    "schema_version",
    "task",
    "model",
    "model_params",
    "sweep",
    "initial_state",
    "initial_density",
    "times",
    "out",
    "seed",
    "tolerances",
    "include_induced_decay",
}


class ConfigError(Exception):
    pass


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _grid(spec, what: str) -> list[float]:
    if not isinstance(spec, dict):
        raise ConfigError(f"{what} must be an object")
    if "values" in spec:
        vals = [float(v) for v in spec["values"]]
    else:
        try:
            start, stop, step = float(spec["start"]), float(spec["stop"]), float(spec["step"])
        except KeyError as e:
            raise ConfigError(f"{what} needs values or start/stop/step") from e
        if step == 0:
            raise ConfigError(f"{what} step must be nonzero")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        vals = [start + i * step for i in range(max(n, 0))]
    if not vals:
        raise ConfigError(f"{what} grid is empty")
    diffs = np.diff(vals)
    if len(vals) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ConfigError(f"{what} grid must be strictly monotone")
    return vals


def _times(cfg: dict) -> list[float]:
    ts = _grid(cfg.get("times", {}), "times")
    if len(ts) > 1 and ts[1] < ts[0]:
        raise ConfigError("time grid must increase")
    return ts


def _model_objects(cfg: dict):
    """(H, labels, params_object) for the configured model."""
    model = cfg.get("model")
    mp = dict(cfg.get("model_params", {}))
    if model == "stub":
        p = StubRibbonParams(
            N=int(mp["N"]),
            up_hoppings=tuple(mp["up_hoppings"]),
            lam=float(mp["lam"]),
            J=float(mp.get("J", 1.0)),
        )
        return build_stub(p), site_labels(p), p
    if model == "diamond":
        p = DiamondRingParams(
            eps_value=float(mp["eps_value"]),
            kappa=float(mp["kappa"]),
            eps_is_imaginary=bool(mp.get("eps_is_imaginary", False)),
            J=float(mp.get("J", 1.0)),
        )
        return build_diamond(p), ["A", "B", "C", "D"], p
    if model == "adiabatic-stub":
        p = AdiabaticStubConfig(
            N=int(mp["N"]),
            j_ab=mp["j_ab"],
            j_ad=mp["j_ad"],
            j_bd=mp["j_bd"],
            theta=float(mp["theta"]),
            kappa_d=mp["kappa_d"],
            J=float(mp.get("J", 1.0)),
            kappa_a=mp.get("kappa_a", 0.0),
            kappa_b=mp.get("kappa_b", 0.0),
            kappa_c=mp.get("kappa_c", 0.0),
        )
        H, kappa = build_full(p)
        M = H - 0.5j * np.diag(np.asarray(kappa, dtype=float))
        fake = StubRibbonParams(p.N, (1.0,) * p.N, 1.0, p.J)
        labels = site_labels(fake) + [f"D{n}" for n in range(1, p.N + 1)]
        return M, labels, p
    if model == "adiabatic-diamond":
        p = AdiabaticDiamondConfig(
            g=tuple(mp["g"]),
            g_first=tuple(mp["g_first"]),
            g_second=tuple(mp["g_second"]),
            thetas=tuple(mp["thetas"]),
            kappa_f=tuple(mp["kappa_f"]),
            kappa_primary=tuple(mp.get("kappa_primary", (0.0,) * 4)),
        )
        H, kappa = build_full(p)
        M = H - 0.5j * np.diag(np.asarray(kappa, dtype=float))
        return M, ["a", "b", "c", "d", "f1", "f2", "f3", "f4"], p
    if model == "matrix-file":
        path = Path(mp["path"])
        if not path.exists():
            raise ConfigError(f"matrix file {path} not found")
        H = load_matrix_csv(path)
        return H, [f"m{i + 1}" for i in range(H.shape[0])], None
    raise ConfigError(f"unknown model {model!r}; expected one of {MODELS}")


def load_matrix_csv(path) -> np.ndarray:
    """Matrix from a sidecar CSV: each row lists re,im pairs."""
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        vals = [float(v) for v in line.split(",")]
        if len(vals) % 2:
            raise ConfigError(f"odd value count in matrix row of {path}")
        arr = np.asarray(vals)
        rows.append(arr[0::2] + 1j * arr[1::2])
    M = np.array(rows, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ConfigError(f"matrix in {path} is not square: {M.shape}")
    return M


def _initial_state(cfg: dict, labels: list[str], dim: int) -> np.ndarray:
    spec = cfg.get("initial_state")
    if not isinstance(spec, dict):
        raise ConfigError("initial_state must be an object")
    if "vector" in spec:
        vals = np.asarray([float(v) for v in spec["vector"]])
        if vals.size != 2 * dim:
            raise ConfigError(
                f"initial_state.vector needs {2 * dim} re/im values, got {vals.size}"
            )
        return vals[0::2] + 1j * vals[1::2]
    if "site" in spec:
        sites = [spec["site"]]
    elif "sites" in spec:
        sites = list(spec["sites"])
    else:
        raise ConfigError("initial_state needs site, sites, or vector")
    psi = np.zeros(dim, dtype=np.complex128)
    for s in sites:
        if s not in labels:
            raise ConfigError(f"unknown site {s!r}; labels are {labels}")
        psi[labels.index(s)] = 1.0
    return psi / np.linalg.norm(psi)


def _resolve(raw: dict, args, task: str) -> dict:
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version}")
    cfg = dict(raw)
    cfg["schema_version"] = SCHEMA_VERSION
    cfg.setdefault("task", task)
    if cfg["task"] != task:
        raise ConfigError(
            f"config task {cfg['task']!r} does not match subcommand {task!r}"
        )
    if args.seed is not None:
        cfg["seed"] = args.seed
    cfg.setdefault("seed", 0)
    if args.out is not None:
        cfg["out"] = args.out
    if "out" not in cfg:
        raise ConfigError("no output path: set config 'out' or pass --out")
    tol = dict(cfg.get("tolerances", {}))
    if args.rank_tol is not None:
        tol["rank_tol"] = args.rank_tol
    if args.cluster_tol is not None:
        tol["cluster_tol"] = args.cluster_tol
    cfg["tolerances"] = tol
    if cfg.get("model") not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}")
    return cfg


def _config_hash(cfg: dict) -> str:
    # The output path is delivery detail, not computation input; leave it
    # out so re-runs into different files hash identically.
    canon = json.dumps(
        {k: v for k, v in cfg.items() if k != "out"},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(canon.encode()).hexdigest()


def _header_lines(cfg: dict) -> list[str]:
    tol = cfg["tolerances"]
    return [
        f"# epdyn {__version__}",
        f"# config_sha256: {_config_hash(cfg)}",
        f"# seed: {cfg['seed']}",
        f"# rank_tol: {tol.get('rank_tol')}  cluster_tol: {tol.get('cluster_tol')}",
    ]


def _write_csv(cfg: dict, columns: list[str], rows: list[list[float]]):
    out = Path(cfg["out"])
    lines = _header_lines(cfg)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    out.write_text("\n".join(lines) + "\n")
    _write_effective(cfg)


def _write_effective(cfg: dict):
    eff = Path(str(cfg["out"]) + ".effective.json")
    eff.write_text(json.dumps(cfg, sort_keys=True, indent=2) + "\n")


def _sweep_items(cfg: dict):
    sweep = cfg.get("sweep")
    if not isinstance(sweep, dict) or "parameter" not in sweep:
        raise ConfigError("this task needs sweep.parameter and a grid")
    name = sweep["parameter"]
    for value in _grid(sweep, "sweep"):
        sub = dict(cfg)
        sub["model_params"] = dict(cfg.get("model_params", {}), **{name: value})
        H, labels, _ = _model_objects(sub)
        yield value, H, labels
    return


def _tols(cfg: dict):
    tol = cfg["tolerances"]
    return tol.get("cluster_tol"), tol.get("rank_tol")


def run(cfg: dict) -> int:
    task = cfg["task"]
    if task == "spectrum-sweep":
        rows, columns = [], None
        pname = cfg["sweep"]["parameter"]
        for value, H, _ in _sweep_items(cfg):
            w = linalg.eig_general(H).eigenvalues
            if columns is None:
                columns = [pname] + [
                    f"E{i + 1}_{p}" for i in range(len(w)) for p in ("re", "im")
                ]
            rows.append([value] + [x for e in w for x in (e.real, e.imag)])
        _write_csv(cfg, columns, rows)
        return 0

    if task == "petermann-sweep":
        rows = []
        pname = cfg["sweep"]["parameter"]
        for value, H, _ in _sweep_items(cfg):
            rep = petermann(linalg.eig_general(H))
            rows.append(
                [value, rep.inverse_average, rep.average, float(rep.diverged)]
            )
        _write_csv(
            cfg, [pname, "inverse_average", "average", "diverged"], rows
        )
        return 0

    if task == "pcr-check":
        H, _, _ = _model_objects(cfg)
        cluster_tol, rank_tol = _tols(cfg)
        structure = jordan.analyze(H, cluster_tol=cluster_tol, rank_tol=rank_tol)
        basis = build_pcr(H, structure)
        defective = any(structure.chains[i] for i in range(len(structure.clusters)))
        message = (
            "defective; pseudo-completeness relation constructed"
            if defective
            else "nondefective; standard completeness used"
        )
        report = {
            "epdyn_version": __version__,
            "config_sha256": _config_hash(cfg),
            "tolerances": cfg["tolerances"],
            "defective": defective,
            "message": message,
            "closure_residual": basis.closure_residual,
            "chain_residual": basis.chain_residual,
            "clusters": [
                {
                    "eigenvalue": [c.value.real, c.value.imag],
                    "algebraic_multiplicity": c.algebraic_multiplicity,
                    "geometric_multiplicity": c.geometric_multiplicity,
                    "ep_order": jordan.ep_order(structure, i),
                }
                for i, c in enumerate(structure.clusters)
            ],
        }
        Path(cfg["out"]).write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
        _write_effective(cfg)
        print(message)
        return 0

    if task == "evolve":
        H, labels, _ = _model_objects(cfg)
        cluster_tol, rank_tol = _tols(cfg)
        basis = build_pcr(H, cluster_tol=cluster_tol, rank_tol=rank_tol)
        psi0 = _initial_state(cfg, labels, H.shape[0])
        p = plan(basis, psi0)
        rows = []
        for t in _times(cfg):
            psi = evolve_closed_form(p, t)
            rows.append(
                [t, float(np.linalg.norm(psi))] + [float(abs(a) ** 2) for a in psi]
            )
        _write_csv(cfg, ["time", "norm"] + [f"pop_{s}" for s in labels], rows)
        return 0

    if task == "density-evolve":
        H, labels, _ = _model_objects(cfg)
        cluster_tol, rank_tol = _tols(cfg)
        basis = build_pcr(H, cluster_tol=cluster_tol, rank_tol=rank_tol)
        longest = max(
            basis.chain_pairs(), key=lambda p: p.chain_length, default=None
        )
        if longest is None:
            raise EpdynError("density-evolve target needs a defective model")
        target = next(
            p.right
            for p in basis.chain_pairs()
            if p.chain_id == longest.chain_id and p.position_in_chain == 1
        )
        target = target / np.linalg.norm(target)
        dens = cfg.get("initial_density")
        if not isinstance(dens, dict):
            raise ConfigError("density-evolve needs initial_density")
        times = _times(cfg)
        if "ensemble_size" in dens:
            mean_f, mean_p = mixed_ensemble_series(
                H, target, times, int(dens["ensemble_size"]), int(cfg["seed"])
            )
            rows = [
                [t, f, p] for t, f, p in zip(times, mean_f, mean_p)
            ]
            _write_csv(cfg, ["time", "mean_fidelity", "mean_purity"], rows)
            return 0
        if "weights" not in dens:
            raise ConfigError("initial_density needs weights or ensemble_size")
        weights = np.asarray([float(w) for w in dens["weights"]])
        traj = density_evolve(H, np.diag(weights), times, target=target)
        rows = []
        for i, t in enumerate(times):
            rows.append(
                [t, traj.fidelity[i], traj.purity[i]]
                + [float(v) for v in traj.diagonals[i]]
            )
        _write_csv(
            cfg,
            ["time", "fidelity", "purity"] + [f"rho_{s}{s}" for s in labels],
            rows,
        )
        return 0

    if task == "transfer":
        H, labels, params = _model_objects(cfg)
        if not isinstance(params, DiamondRingParams):
            raise ConfigError("transfer requires the diamond model")
        psi0 = _initial_state(cfg, labels, 4)
        times = _times(cfg)
        f_init, f_target = entanglement_transfer_fidelities(params, psi0, times)
        rows = [
            [t, fi, ft] for t, fi, ft in zip(times, f_init, f_target)
        ]
        _write_csv(
            cfg, ["time", "fidelity_initial_form", "fidelity_target_form"], rows
        )
        return 0

    if task == "eliminate-compare":
        _, labels, params = _model_objects(cfg)
        if not isinstance(params, (AdiabaticStubConfig, AdiabaticDiamondConfig)):
            raise ConfigError("eliminate-compare requires an adiabatic model")
        psi0 = _initial_state(cfg, labels[: params.primary_dim], params.primary_dim)
        times = _times(cfg)
        errors = compare_full_vs_effective(
            params, psi0, times, bool(cfg.get("include_induced_decay", True))
        )
        _write_csv(
            cfg, ["time", "error"], [[t, e] for t, e in zip(times, errors)]
        )
        return 0

    raise ConfigError(f"unknown task {task!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epdyn", description="exceptional-point dynamics toolkit"
    )
    sub = parser.add_subparsers(dest="task", required=True)
    for task in TASKS:
        sp = sub.add_parser(task)
        sp.add_argument("config", help="path to a JSON scenario config")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--rank-tol", type=float, default=None)
        sp.add_argument("--cluster-tol", type=float, default=None)
        sp.add_argument("--out", default=None)
    return parser


def _fail(exc: Exception, code: int) -> int:
    doc = {
        "error": {
            "type": type(exc).__name__,
            "message": str(exc),
            "exit_code": code,
        }
    }
    print(json.dumps(doc), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        raw = json.loads(Path(args.config).read_text())
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        cfg = _resolve(raw, args, args.task)
    except (OSError, json.JSONDecodeError, ConfigError, KeyError, TypeError, ValueError) as e:
        return _fail(e, 2)
    try:
        return run(cfg)
    except ConfigError as e:
        return _fail(e, 2)
    except (EpdynError, np.linalg.LinAlgError, ArithmeticError) as e:
        return _fail(e, 3)


if __name__ == "__main__":
    sys.exit(main())
