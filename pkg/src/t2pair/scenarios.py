"""Scenario configuration, execution, CSV/figure output and run manifests.

A scenario is described by one JSON document (see ``CONFIG_SCHEMA`` in the
README): a ``scenario`` name, an optional ``preset``, axis grids, and the
bath/protocol sections the scenario needs.  Every scenario writes one CSV
per computed quantity with the header ``r,t,value`` (rows r-major, values
as shortest round-trip decimals, so reruns are byte-identical), a PNG
rendering of each quantity unless figures are disabled, and a
``manifest.json`` listing every output with its SHA-256 checksum.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path

import numpy as np

from . import __version__, diffusive, filters, harmonic, markovian
from .errors import ConfigError, IoError
from .model import (
    CattaneoParams,
    DrivenGaussianOccupation,
    GaplessDispersion,
    GappedDispersion,
    MomentumGrid,
    NvParams,
    ParametricDriveOccupation,
    ProbeGeometry,
    ProtocolKind,
    SpaceTimeMap,
    ThermalOccupation,
    validate,
)

SCHEMA_VERSION = 1

SCENARIOS = (
    "filters",
    "markov",
    "harmonic-map",
    "gapless-map",
    "diffusive-map",
    "nv-map",
    "parametric",
    "verify",
)

# Presets bundle the parameter sets behind the reference space-time maps:
# a gapped thermal bath (equilibrium light cone), the same bath driven at
# zero / finite momentum (long-range fringes), gapless baths with z = 1
# (marginal, logarithmic growth) and z = 2, the bare diffusive bath in its
# ballistic window and across the ballistic-diffusive crossover, and the
# dipole-filtered (NV) variant.
PRESETS: dict[str, dict[str, dict]] = {
    "filters": {
        "default": {
            "grid": {"r": {"start": 1e-3, "stop": 50.0, "num": 400, "spacing": "log"},
                     "t": [1.0, 2.0, 5.0]},
        },
    },
    "markov": {
        "default": {
            "markov": {"gamma0": 1.0, "gamma_r": 0.5, "r": 1.0},
            "grid": {"r": [1.0], "t": {"start": 0.0, "stop": 10.0, "num": 101}},
        },
        "global-noise": {
            "markov": {"gamma0": 1.0, "gamma_r": 1.0, "r": 0.5},
            "grid": {"r": [0.5], "t": {"start": 0.0, "stop": 10.0, "num": 101}},
        },
    },
    "harmonic-map": {
        "fig2-equilibrium": {
            "dispersion": {"type": "gapped", "omega0": 1.0, "c": 1.0},
            "occupation": {"type": "thermal", "T": 1.0},
            "geometry": {"type": "geometry", "dimension": 2, "r": 0.0,
                         "lambda1": 1.0, "lambda2": 1.0, "delta": 0.0},
            "momentum_grid": {"type": "momentum-grid", "k_min": 0.0, "k_max": 30.0,
                              "n_points": 2049, "spacing": "linear"},
            "grid": {"r": {"start": 0.0, "stop": 12.0, "num": 60},
                     "t": {"start": 0.2, "stop": 12.0, "num": 60}},
        },
        "fig2-kdr-zero-drive": {
            "dispersion": {"type": "gapped", "omega0": 1.0, "c": 1.0},
            "occupation": {"type": "driven-gaussian", "T": 1.0, "amplitude": 10.0,
                           "k_dr": 0.0, "sigma_dr": 0.1},
            "geometry": {"type": "geometry", "dimension": 2, "r": 0.0,
                         "lambda1": 1.0, "lambda2": 1.0, "delta": 0.0},
            "momentum_grid": {"type": "momentum-grid", "k_min": 0.0, "k_max": 30.0,
                              "n_points": 2049, "spacing": "linear"},
            "grid": {"r": {"start": 0.0, "stop": 20.0, "num": 60},
                     "t": {"start": 0.2, "stop": 12.0, "num": 60}},
        },
        "fig2-finite-kdr-drive": {
            "dispersion": {"type": "gapped", "omega0": 1.0, "c": 1.0},
            "occupation": {"type": "driven-gaussian", "T": 1.0, "amplitude": 10.0,
                           "k_dr": 3.0, "sigma_dr": 0.1},
            "geometry": {"type": "geometry", "dimension": 2, "r": 0.0,
                         "lambda1": 1.0, "lambda2": 1.0, "delta": 0.0},
            "momentum_grid": {"type": "momentum-grid", "k_min": 0.0, "k_max": 30.0,
                              "n_points": 2049, "spacing": "linear"},
            "grid": {"r": {"start": 0.0, "stop": 20.0, "num": 60},
                     "t": {"start": 0.2, "stop": 12.0, "num": 60}},
        },
    },
    "gapless-map": {
        "fig3-z1": {
            "dispersion": {"type": "gapless", "alpha": 1.0, "z": 1.0},
            "occupation": {"type": "thermal", "T": 10.0},
            "geometry": {"type": "geometry", "dimension": 3, "r": 0.0,
                         "lambda1": 1.0, "lambda2": 1.0, "delta": 0.0},
            "momentum_grid": {"type": "momentum-grid", "k_min": 0.0, "k_max": 10.0,
                              "n_points": 2049, "spacing": "linear"},
            "grid": {"r": {"start": 0.0, "stop": 12.0, "num": 60},
                     "t": {"start": 1.0, "stop": 10.0, "num": 60}},
        },
        "fig3-z2": {
            "dispersion": {"type": "gapless", "alpha": 1.0, "z": 2.0},
            "occupation": {"type": "thermal", "T": 20.0},
            "geometry": {"type": "geometry", "dimension": 3, "r": 0.0,
                         "lambda1": 1.0, "lambda2": 1.0, "delta": 0.0},
            "momentum_grid": {"type": "momentum-grid", "k_min": 0.0, "k_max": 10.0,
                              "n_points": 2049, "spacing": "linear"},
            "grid": {"r": {"start": 0.0, "stop": 15.0, "num": 60},
                     "t": {"start": 1.0, "stop": 10.0, "num": 60}},
        },
    },
    "diffusive-map": {
        "fig5-ballistic": {
            "cattaneo": {"type": "cattaneo", "c": 1.0, "tau_D": 1.0, "tau_s": 100.0,
                         "chi0": 1.0, "T": 1.0, "Lambda": 50.0, "a": 0.1},
            "grid": {"r": {"start": 0.0, "stop": 2.0, "num": 60},
                     "t": {"start": 0.02, "stop": 1.0, "num": 60}},
        },
        "fig5-crossover": {
            "cattaneo": {"type": "cattaneo", "c": 1.0, "tau_D": 1.0, "tau_s": 100.0,
                         "chi0": 1.0, "T": 1.0, "Lambda": 50.0, "a": 0.1},
            "grid": {"r": {"start": 0.0, "stop": 15.0, "num": 60},
                     "t": {"start": 0.5, "stop": 30.0, "num": 60}},
        },
    },
    "nv-map": {
        "fig6": {
            "nv": {"type": "nv",
                   "base": {"type": "cattaneo", "c": 1.0, "tau_D": 1.0,
                            "tau_s": 100.0, "chi0": 1.0, "T": 1.0,
                            "Lambda": 50.0, "a": 0.1},
                   "d": 1.0, "kernel_prefactor": None},
            "grid": {"r": {"start": 0.0, "stop": 6.0, "num": 60},
                     "t": {"start": 0.05, "stop": 30.0, "num": 60, "spacing": "log"}},
        },
    },
    "parametric": {
        "default": {
            "dispersion": {"type": "gapped", "omega0": 1.0, "c": 1.0},
            "parametric": {"T": 0.1, "delta": 0.2, "Omega": 2.0},
            "grid": {"r": {"start": 0.0, "stop": 2.0, "num": 40},
                     "t": {"start": 0.0, "stop": 20.0, "num": 60}},
        },
    },
}

_DEFAULTS = {"out_dir": "out", "tol": 1e-7, "workers": 1, "figures": True}


# ---------------------------------------------------------------------------
# config assembly

def _axis(spec) -> list[float]:
    if isinstance(spec, (list, tuple)):
        vals = [float(v) for v in spec]
    elif isinstance(spec, dict):
        try:
            num = int(spec["num"])
            if spec.get("spacing") == "log":
                vals = list(np.geomspace(float(spec["start"]), float(spec["stop"]), num))
            else:
                vals = list(np.linspace(float(spec["start"]), float(spec["stop"]), num))
        except KeyError as exc:
            raise ConfigError(f"axis spec missing key {exc}") from None
    else:
        raise ConfigError(f"axis spec must be a list or start/stop/num dict, got {spec!r}")
    if not vals or sorted(vals) != vals:
        raise ConfigError("axis values must be non-empty and sorted")
    return [float(v) for v in vals]


def build_config(scenario: str, preset: str | None = None, overrides: dict | None = None) -> dict:
    """Merge preset defaults and user overrides into one config dict."""
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}")
    config: dict = {"schema_version": SCHEMA_VERSION, "scenario": scenario}
    config.update(_DEFAULTS)
    if scenario != "verify":
        presets = PRESETS.get(scenario, {})
        name = preset or next(iter(presets), None)
        if name is not None:
            if name not in presets:
                raise ConfigError(
                    f"unknown preset {name!r} for {scenario}; available: {sorted(presets)}"
                )
            config["preset"] = name
            config.update(json.loads(json.dumps(presets[name])))
    if overrides:
        for key, value in overrides.items():
            if value is not None:
                config[key] = value
    if config.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {config.get('schema_version')!r}"
        )
    return config


def load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must contain a JSON object")
    return data


# ---------------------------------------------------------------------------
# output helpers

def _format(x: float) -> str:
    return repr(float(x))


def write_csv(path: Path, r_values, t_values, values) -> None:
    """r-major rows of ``r,t,value`` with shortest round-trip decimals."""
    lines = ["r,t,value"]
    arr = np.asarray(values)
    for i, r in enumerate(r_values):
        for j, t in enumerate(t_values):
            lines.append(f"{_format(r)},{_format(t)},{_format(arr[i, j])}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


class _Emitter:
    def __init__(self, out_dir: Path, figures: bool):
        self.out_dir = out_dir
        self.figures = figures
        self.outputs: list[Path] = []
        self.warnings: list[str] = []

    def emit_map(self, name: str, r_values, t_values, values, title: str) -> None:
        csv_path = self.out_dir / f"{name}.csv"
        write_csv(csv_path, r_values, t_values, values)
        self.outputs.append(csv_path)
        if self.figures:
            from . import report

            png = self.out_dir / f"{name}.png"
            report.render_map(png, r_values, t_values, values, title)
            self.outputs.append(png)

    def emit_curves(self, name: str, x, series: dict, xlabel: str, title: str,
                    logx: bool = False, logy: bool = False) -> None:
        if not self.figures:
            return
        from . import report

        png = self.out_dir / f"{name}.png"
        report.render_curves(png, x, series, xlabel, title, logx=logx, logy=logy)
        self.outputs.append(png)


# ---------------------------------------------------------------------------
# scenario runners

def _profile_from(values: np.ndarray) -> np.ndarray:
    # normalize each t column by the r = 0 row
    base = values[0, :]
    if np.any(base == 0.0):
        raise ConfigError("profile normalization needs nonzero values at r = 0; "
                          "avoid t = 0 in the grid")
    return values / base[None, :]


def _run_filters(config, em: _Emitter):
    omegas = _axis(config["grid"]["r"])
    ts = _axis(config["grid"]["t"])
    kinds = {
        "w_ram": (ProtocolKind.RAMSEY, lambda v: v.real),
        "w_lse_im": (ProtocolKind.LOCAL_SPIN_ECHO, lambda v: v.imag),
        "w_gse": (ProtocolKind.GLOBAL_SPIN_ECHO, lambda v: v.real),
    }
    for name, (kind, pick) in kinds.items():
        vals = np.empty((len(omegas), len(ts)))
        for j, t in enumerate(ts):
            vals[:, j] = pick(filters.eval_filter(kind, np.asarray(omegas), t))
        em.emit_map(name, omegas, ts, vals, f"{name} (axes: omega, t)")
    comb = np.empty((len(omegas), len(ts)), dtype=complex)
    for j, t in enumerate(ts):
        comb[:, j] = filters.filter_combination(np.asarray(omegas), t)
    em.emit_map("w_combination_re", omegas, ts, comb.real,
                "combination, real part (axes: omega, t)")
    em.emit_map("w_combination_im", omegas, ts, comb.imag,
                "combination, imaginary part (axes: omega, t)")
    em.emit_curves(
        "filters_lowfreq",
        omegas,
        {name: np.abs([complex(filters.eval_filter(kind, w, ts[0])) for w in omegas])
         for name, (kind, _) in kinds.items()},
        "omega", f"|filter| at t = {ts[0]}", logx=True, logy=True,
    )
    return {"axes": {"r": "omega", "t": "t"}}


def _run_markov(config, em: _Emitter):
    section = config.get("markov")
    if not isinstance(section, dict):
        raise ConfigError("markov scenario needs a 'markov' section")
    try:
        spec = markovian.MarkovSpec(float(section["gamma0"]), float(section["gamma_r"]))
        r = float(section.get("r", 0.0))
    except KeyError as exc:
        raise ConfigError(f"markov section missing key {exc}") from None
    ts = _axis(config["grid"]["t"])
    sig = [markovian.markov_signal(spec, t) for t in ts]
    for name, pick in (("n1", lambda s: s.n1), ("n12", lambda s: s.n12),
                       ("coherence", lambda s: s.coherence)):
        vals = np.array([[pick(s) for s in sig]])
        em.emit_map(name, [r], ts, vals, f"markov {name}")
    em.emit_curves("markov_coherence", ts, {"coherence": [s.coherence for s in sig]},
                   "t", "two-qubit coherence")
    return {"axes": {"r": "separation (fixed)", "t": "t"}}


def _parse_section(config, key, builder):
    section = config.get(key)
    if section is None:
        raise ConfigError(f"scenario needs a {key!r} section")
    return builder(section)


def _build_dispersion(section):
    kind = section.get("type")
    if kind == "gapped":
        return validate(GappedDispersion(float(section["omega0"]), float(section["c"])))
    if kind == "gapless":
        return GaplessDispersion(float(section["alpha"]), float(section["z"]))
    raise ConfigError(f"unknown dispersion type {kind!r}")


def _build_occupation(section):
    kind = section.get("type")
    if kind == "thermal":
        return validate(ThermalOccupation(float(section["T"])))
    if kind == "driven-gaussian":
        return validate(DrivenGaussianOccupation(
            float(section["T"]), float(section["amplitude"]),
            float(section["k_dr"]), float(section["sigma_dr"])))
    raise ConfigError(f"unknown occupation type {kind!r}")


def _build_geometry(section):
    return validate(ProbeGeometry(
        dimension=int(section.get("dimension", 2)),
        r=float(section.get("r", 0.0)),
        lambda1=float(section.get("lambda1", 1.0)),
        lambda2=float(section.get("lambda2", 1.0)),
        delta=float(section.get("delta", 0.0)),
    ))


def _build_momentum_grid(section):
    return validate(MomentumGrid(
        k_min=float(section["k_min"]), k_max=float(section["k_max"]),
        n_points=int(section.get("n_points", 2049)),
        spacing=section.get("spacing", "linear"),
    ))


def _run_harmonic_like(config, em: _Emitter):
    disp = _parse_section(config, "dispersion", _build_dispersion)
    occ = _parse_section(config, "occupation", _build_occupation)
    geom = _parse_section(config, "geometry", _build_geometry)
    grid = _parse_section(config, "momentum_grid", _build_momentum_grid)
    validate(disp, dimension=geom.dimension)
    rs = _axis(config["grid"]["r"])
    ts = _axis(config["grid"]["t"])
    vals, ok = harmonic.noise_map(
        disp, occ, geom, rs, ts, grid,
        rel_tol=float(config["tol"]), workers=int(config["workers"]),
    )
    if not ok:
        em.warnings.append("n12: momentum integral not converged at max refinement")
    em.emit_map("n12", rs, ts, vals, "correlated noise n12(r, t)")
    em.emit_map("f", rs, ts, _profile_from(vals), "profile f(r, t) = n12/n12(r=0)")
    if config.get("emit_response"):
        xvals, xok = harmonic.response_map(
            disp, geom, rs, ts, grid,
            rel_tol=float(config["tol"]), workers=int(config["workers"]),
        )
        if not xok:
            em.warnings.append("x12: momentum integral not converged at max refinement")
        em.emit_map("x12", rs, ts, xvals, "integrated response x12(r, t)")
    return {"axes": {"r": "r", "t": "t"}}


def _run_diffusive_map(config, em: _Emitter):
    section = config.get("cattaneo")
    if section is None:
        raise ConfigError("diffusive-map needs a 'cattaneo' section")
    params = validate(CattaneoParams(**{k: float(v) for k, v in section.items()
                                        if k != "type"}))
    rs = _axis(config["grid"]["r"])
    ts = _axis(config["grid"]["t"])
    vals, ok = diffusive.noise_map(
        rs, ts, params, rel_tol=float(config["tol"]), workers=int(config["workers"]),
    )
    if not ok:
        em.warnings.append("n12: radial integral not converged at max refinement")
    em.emit_map("n12", rs, ts, vals, "correlated noise n12(r, t)")
    em.emit_map("f", rs, ts, _profile_from(vals), "profile f(r, t) = n12/n12(r=0)")
    return {"axes": {"r": "r", "t": "t"}}


def _run_nv_map(config, em: _Emitter):
    section = config.get("nv")
    if section is None:
        raise ConfigError("nv-map needs an 'nv' section")
    base = validate(CattaneoParams(**{k: float(v) for k, v in section["base"].items()
                                      if k != "type"}))
    pref = section.get("kernel_prefactor")
    nv = validate(NvParams(base=base, d=float(section["d"]),
                           kernel_prefactor=None if pref is None else float(pref)))
    rs = _axis(config["grid"]["r"])
    ts = _axis(config["grid"]["t"])
    ff = lambda k: diffusive.nv_form_factor(k, nv)
    vals, ok = diffusive.noise_map(
        rs, ts, nv.base, form_factor=ff,
        rel_tol=float(config["tol"]), workers=int(config["workers"]),
    )
    if not ok:
        em.warnings.append("n12: radial integral not converged at max refinement")
    em.emit_map("n12", rs, ts, vals, "dipole-filtered correlated noise n12(r, t)")
    em.emit_map("f", rs, ts, _profile_from(vals), "profile f(r, t) = n12/n12(r=0)")
    return {"axes": {"r": "r", "t": "t"}}


def _run_parametric(config, em: _Emitter):
    disp = _parse_section(config, "dispersion", _build_dispersion)
    section = config.get("parametric")
    if section is None:
        raise ConfigError("parametric scenario needs a 'parametric' section")
    ks = _axis(config["grid"]["r"])
    ts = _axis(config["grid"]["t"])
    n_vals = np.empty((len(ks), len(ts)))
    m_vals = np.empty((len(ks), len(ts)))
    for j, t in enumerate(ts):
        occ = validate(ParametricDriveOccupation(
            T=float(section["T"]), delta=float(section["delta"]),
            Omega=float(section["Omega"]), t_drive=t))
        n, m = harmonic.parametric_occupation(occ, disp, np.asarray(ks))
        n_vals[:, j] = n
        m_vals[:, j] = m
    em.emit_map("n_k", ks, ts, n_vals, "driven occupation n_k(t) (axes: k, t_drive)")
    em.emit_map("m_k", ks, ts, m_vals, "anomalous density |m_k(t)| (axes: k, t_drive)")
    return {"axes": {"r": "k", "t": "t_drive"}}


_RUNNERS = {
    "filters": _run_filters,
    "markov": _run_markov,
    "harmonic-map": _run_harmonic_like,
    "gapless-map": _run_harmonic_like,
    "diffusive-map": _run_diffusive_map,
    "nv-map": _run_nv_map,
    "parametric": _run_parametric,
}


def run_scenario(config: dict) -> dict:
    """Execute a scenario config; returns the manifest dict (also written
    to ``<out_dir>/manifest.json``)."""
    scenario = config.get("scenario")
    if scenario not in _RUNNERS:
        raise ConfigError(f"unknown or unsupported scenario {scenario!r}")
    out_dir = Path(config.get("out_dir", "out"))
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output directory {out_dir}: {exc}") from exc

    em = _Emitter(out_dir, bool(config.get("figures", True)))
    started = time.perf_counter()
    notes = _RUNNERS[scenario](config, em) or {}
    wall = time.perf_counter() - started

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "tool": "t2pair",
        "version": __version__,
        "scenario": scenario,
        "preset": config.get("preset"),
        "config": config,
        "notes": notes,
        "wall_time_s": wall,
        "convergence_warnings": em.warnings,
        "outputs": [
            {"path": p.name, "sha256": _sha256(p), "bytes": p.stat().st_size}
            for p in em.outputs
        ],
    }
    try:
        (out_dir / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=False) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise IoError(f"cannot write manifest: {exc}") from exc
    return manifest


def map_from_csv(path: Path) -> SpaceTimeMap:
    """Re-read an emitted CSV into a SpaceTimeMap (quantity from filename)."""
    rows = [line.split(",") for line in
            path.read_text(encoding="utf-8").strip().splitlines()[1:]]
    rs = sorted({float(r) for r, _, _ in rows})
    ts = sorted({float(t) for _, t, _ in rows})
    grid = {(float(r), float(t)): float(v) for r, t, v in rows}
    values = [[grid[(r, t)] for t in ts] for r in rs]
    quantity = path.stem if path.stem in ("n12", "x12", "n1", "f") else "n12"
    return SpaceTimeMap(tuple(rs), tuple(ts), tuple(map(tuple, values)),
                        quantity, {"source": path.name})
