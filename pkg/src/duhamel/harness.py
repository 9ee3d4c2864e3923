"""Experiment orchestration: configs, cached references, convergence sweeps.

A convergence experiment is described by one INI-style config file (see
``load_config`` for the schema and ``configs/`` in the repository for shipped
examples).  For every seed the runner draws initial data, computes a cached
high-accuracy reference solution, evolves every (scheme, tau) cell, measures
errors at the final time, and fits per-scheme order slopes.

Reference solutions are integrated with ``duhamel2`` at
``tau_ref = min(taus)/tau_divisor`` and cross-checked against an
independent-family scheme at the same step size; disagreement beyond the
configured relative L2 tolerance aborts the run.  References are cached on
disk under ``<out>/refcache/<sha256>.field``:

    bytes 0-7    magic ``b"DUHFIELD"``
    bytes 8-11   format version, uint32 little-endian (currently 1)
    byte  12     grid kind (0 torus, 1 interval)
    byte  13     grid dim
    bytes 14-15  reserved (zero)
    bytes 16-19  modes per dimension, uint32 little-endian
    bytes 20-    coefficients, complex128 little-endian, C order

Cache files are written atomically (write to temp file, then rename).
"""

import configparser
import csv
import hashlib
import json
import os
import struct
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import __version__
from .equations import kg_error, make_equation, EQUATION_NAMES
from .errors import BlowUp, ReferenceDisagreement
from .fields import (COEFFICIENT, SpectralField, rough_field, smooth_field,
                     sobolev_norm, to_coefficient)
from .grids import INTERVAL, TORUS, make_grid
from .integrators import canonical_scheme, evolve
from .analysis import fit_order

_MAGIC = b"DUHFIELD"
_FORMAT_VERSION = 1


# --- configuration --------------------------------------------------------------

@dataclass
class ExperimentConfig:
    name: str
    equation: str
    params: dict
    grid_kind: str
    grid_dim: int
    grid_modes: int
    schemes: list
    gamma: float
    target_norm: float
    data: str                  # "rough" | "smooth"
    smooth_cutoff: float
    seeds: list
    taus: list
    t_end: float
    error_norm: float
    tau_divisor: int
    cross_scheme: str
    cross_tol: float
    out_dir: str
    formats: list

    def validate(self):
        if self.equation not in EQUATION_NAMES:
            raise ValueError(f"[experiment] equation: unknown {self.equation!r}")
        if self.data not in ("rough", "smooth"):
            raise ValueError("[experiment] data must be 'rough' or 'smooth'")
        if not self.seeds:
            raise ValueError("[experiment] seeds: need at least one seed")
        if len(self.taus) < 4:
            raise ValueError("[experiment] taus: need at least 4 values")
        if any(b >= a for a, b in zip(self.taus, self.taus[1:])):
            raise ValueError("[experiment] taus must be strictly decreasing")
        if self.t_end < 0:
            raise ValueError("[experiment] t_end must be nonnegative")
        for tau in self.taus:
            n = round(self.t_end / tau)
            if abs(n * tau - self.t_end) > 1e-12 * max(1.0, self.t_end):
                raise ValueError(
                    f"[experiment] t_end={self.t_end} is not divisible by tau={tau}")
        for s in self.schemes:
            canonical_scheme(s)
        if self.tau_divisor < 1:
            raise ValueError("[reference] tau_divisor must be >= 1")
        for fmt in self.formats:
            if fmt not in ("csv", "json"):
                raise ValueError(f"[output] formats: unknown format {fmt!r}")

    def to_dict(self):
        d = dict(self.__dict__)
        d["params"] = {k: repr(v) for k, v in self.params.items()}
        return d


def _parse_tau(token):
    token = token.strip()
    if "^" in token:
        base, exp = token.split("^")
        return float(base) ** float(exp)
    return float(token)


def _parse_param(text):
    for cast in (int, float, complex):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def load_config(path):
    """Parse and validate an experiment config file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ValueError(f"cannot read config file {path}")
    try:
        exp = parser["experiment"]
        grid = parser["grid"]
    except KeyError as exc:
        raise ValueError(f"config is missing the {exc} section") from exc
    ref = parser["reference"] if parser.has_section("reference") else {}
    out = parser["output"] if parser.has_section("output") else {}
    params = {}
    if parser.has_section("params"):
        params = {k: _parse_param(v) for k, v in parser["params"].items()}

    try:
        cfg = ExperimentConfig(
            name=exp.get("name", "experiment"),
            equation=exp.get("equation", ""),
            params=params,
            grid_kind=grid.get("kind", "torus"),
            grid_dim=int(grid.get("dim", 1)),
            grid_modes=int(grid.get("modes", 256)),
            schemes=exp.get("schemes", "duhamel1").split(),
            gamma=float(exp.get("gamma", 1.0)),
            target_norm=float(exp.get("target_norm", 1.0)),
            data=exp.get("data", "rough"),
            smooth_cutoff=float(exp.get("smooth_cutoff", 8)),
            seeds=[int(s) for s in exp.get("seeds", "0 1 2").split()],
            taus=[_parse_tau(t) for t in exp.get("taus", "").split()],
            t_end=float(exp.get("t_end", 1.0)),
            error_norm=float(exp.get("error_norm", 0.0)),
            tau_divisor=int(ref.get("tau_divisor", 100)),
            cross_scheme=ref.get("cross_scheme", "strang"),
            cross_tol=float(ref.get("cross_tol", 1e-8)),
            out_dir=out.get("dir", "out"),
            formats=out.get("formats", "csv json").split(),
        )
    except (KeyError, ValueError) as exc:
        raise ValueError(f"config field error in {path}: {exc}") from exc
    cfg.validate()
    return cfg


def build_grid(cfg):
    return make_grid(cfg.grid_kind, cfg.grid_dim, cfg.grid_modes)


def build_equation(cfg, grid=None):
    return make_equation(cfg.equation, grid or build_grid(cfg), **cfg.params)


def initial_data(cfg, grid, seed):
    if cfg.data == "smooth":
        return smooth_field(grid, seed, cfg.target_norm,
                            cutoff=cfg.smooth_cutoff, gamma=cfg.gamma)
    return rough_field(grid, cfg.gamma, seed, cfg.target_norm)


# --- reference solutions -----------------------------------------------------------

def _field_key(eq, u0, t_end, tau_ref):
    h = hashlib.sha256()
    h.update(eq.name.encode())
    h.update(f"{eq.grid.kind}/{eq.grid.dim}/{eq.grid.modes_per_dim}".encode())
    for k in sorted(eq.params):
        h.update(f"{k}={eq.params[k]!r}".encode())
    h.update(np.ascontiguousarray(to_coefficient(u0).data).tobytes())
    h.update(struct.pack("<dd", float(t_end), float(tau_ref)))
    return h.hexdigest()


def write_field(path, field):
    grid = field.grid
    kind = 0 if grid.kind == TORUS else 1
    header = (_MAGIC + struct.pack("<I", _FORMAT_VERSION)
              + struct.pack("<BBH", kind, grid.dim, 0)
              + struct.pack("<I", grid.modes_per_dim))
    payload = np.ascontiguousarray(
        to_coefficient(field).data.astype("<c16")).tobytes()
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header + payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_field(path, grid=None):
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:8] != _MAGIC:
        raise ValueError(f"{path} is not a field file")
    version, = struct.unpack_from("<I", raw, 8)
    if version != _FORMAT_VERSION:
        raise ValueError(f"unsupported field format version {version}")
    kind, dim, _ = struct.unpack_from("<BBH", raw, 12)
    modes, = struct.unpack_from("<I", raw, 16)
    g = grid or make_grid(TORUS if kind == 0 else INTERVAL, dim, modes)
    data = np.frombuffer(raw[20:], dtype="<c16").astype(np.complex128)
    return SpectralField(g, data.reshape(g.shape), COEFFICIENT)


def reference_solution(eq, u0, t_end, tau_ref, cross_scheme="strang",
                       cross_tol=1e-8, cache_dir=None):
    """High-accuracy solution at ``t_end``, cross-checked and disk-cached.

    The primary integration uses ``duhamel2`` at ``tau_ref``; a second
    integration with ``cross_scheme`` at the same step must agree within
    ``cross_tol`` in relative L2 or :class:`ReferenceDisagreement` is raised.
    Pass ``cross_scheme=""`` to disable the check (cache hits skip it too).
    """
    if t_end == 0:
        return to_coefficient(u0).copy()
    path = None
    if cache_dir is not None:
        path = os.path.join(cache_dir, _field_key(eq, u0, t_end, tau_ref) + ".field")
        if os.path.exists(path):
            return read_field(path, eq.grid)

    ref = evolve(eq, "duhamel2", u0, tau_ref, t_end).final
    if cross_scheme:
        other = evolve(eq, cross_scheme, u0, tau_ref, t_end).final
        denom = max(float(np.linalg.norm(ref.data)), 1e-300)
        rel = float(np.linalg.norm(ref.data - other.data)) / denom
        if rel > cross_tol:
            raise ReferenceDisagreement(
                f"duhamel2 and {cross_scheme} references differ by {rel:.3e} "
                f"(> {cross_tol:.1e}) at tau_ref={tau_ref:.3e}")
    if path is not None:
        write_field(path, ref)
    return ref


# --- convergence runs ----------------------------------------------------------------

@dataclass
class ConvergenceReport:
    config: dict
    cells: list                       # dicts: scheme, seed, tau, error, status
    slopes: dict                      # scheme -> {str(seed): slope or None}
    median_slopes: dict               # scheme -> float or None
    reference: dict                   # scheme, tau_ref, checksums per seed
    timings: dict
    versions: dict = dc_field(default_factory=dict)

    def to_dict(self):
        return {"config": self.config, "cells": self.cells, "slopes": self.slopes,
                "median_slopes": self.median_slopes, "reference": self.reference,
                "timings": self.timings, "versions": self.versions}

    @classmethod
    def from_dict(cls, d):
        return cls(config=d["config"], cells=d["cells"], slopes=d["slopes"],
                   median_slopes=d["median_slopes"], reference=d["reference"],
                   timings=d["timings"], versions=d.get("versions", {}))


def _cell_error(eq, cfg, u_num, u_ref):
    if eq.is_wave_family:
        composite, literal = kg_error(u_num, u_ref, eq.params["m"])
        return composite, literal
    return sobolev_norm(u_num - u_ref, cfg.error_norm), None


def run_convergence(cfg, out_dir=None, threads=1):
    """Run the configured sweep and return a :class:`ConvergenceReport`."""
    cfg.validate()
    t_start = time.perf_counter()
    grid = build_grid(cfg)
    eq = build_equation(cfg, grid)
    schemes = [canonical_scheme(s) for s in cfg.schemes]
    out_root = out_dir if out_dir is not None else cfg.out_dir
    cache_dir = os.path.join(out_root, "refcache")
    tau_ref = min(cfg.taus) / cfg.tau_divisor

    cells = []
    checksums = {}
    t_reference = 0.0

    def run_cell(u0, ref, scheme, tau):
        try:
            traj = evolve(eq, scheme, u0, tau, cfg.t_end)
            err, literal = _cell_error(eq, cfg, traj.final, ref)
            return {"error": err, "error_literal": literal, "status": "ok"}
        except BlowUp as exc:
            return {"error": None, "error_literal": None,
                    "status": f"blowup@{exc.step_index}"}

    for seed in cfg.seeds:
        u0 = initial_data(cfg, grid, seed)
        t0 = time.perf_counter()
        ref = reference_solution(eq, u0, cfg.t_end, tau_ref,
                                 cross_scheme=cfg.cross_scheme,
                                 cross_tol=cfg.cross_tol, cache_dir=cache_dir)
        t_reference += time.perf_counter() - t0
        checksums[str(seed)] = hashlib.sha256(ref.data.tobytes()).hexdigest()

        jobs = [(scheme, tau) for scheme in schemes for tau in cfg.taus]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(
                    lambda st: run_cell(u0, ref, st[0], st[1]), jobs))
        else:
            results = [run_cell(u0, ref, s, t) for s, t in jobs]
        for (scheme, tau), res in zip(jobs, results):
            cells.append({"scheme": scheme, "seed": seed, "tau": tau, **res})

    slopes = {}
    medians = {}
    for scheme in schemes:
        per_seed = {}
        for seed in cfg.seeds:
            pts = [(c["tau"], c["error"]) for c in cells
                   if c["scheme"] == scheme and c["seed"] == seed
                   and c["status"] == "ok" and c["error"] and c["error"] > 0]
            per_seed[str(seed)] = fit_order(pts).slope if len(pts) >= 3 else None
        slopes[scheme] = per_seed
        vals = [v for v in per_seed.values() if v is not None]
        medians[scheme] = float(np.median(vals)) if vals else None

    import scipy
    report = ConvergenceReport(
        config=cfg.to_dict(),
        cells=cells,
        slopes=slopes,
        median_slopes=medians,
        reference={"scheme": "duhamel2", "tau_ref": tau_ref,
                   "cross_scheme": cfg.cross_scheme, "checksums": checksums},
        timings={"reference_s": t_reference,
                 "total_s": time.perf_counter() - t_start},
        versions={"duhamel": __version__, "numpy": np.__version__,
                  "scipy": scipy.__version__},
    )
    return report


# --- emission -----------------------------------------------------------------------

CSV_COLUMNS = ("equation", "scheme", "seed", "gamma", "tau", "error",
               "norm_index", "status")


def emit_report(report, out_dir, formats=("csv", "json"), basename=None):
    """Write the report; returns the list of paths written.

    The CSV is deterministic for a fixed config and seed set (timings live
    only in the JSON).  A long-format plot-data CSV (tau plus one median
    error column per scheme) is emitted alongside.
    """
    os.makedirs(out_dir, exist_ok=True)
    cfg = report.config
    base = basename or cfg.get("name", "report")
    paths = []

    if "csv" in formats:
        path = os.path.join(out_dir, f"{base}.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for c in report.cells:
                writer.writerow([
                    cfg.get("equation", ""), c["scheme"], c["seed"],
                    repr(float(cfg.get("gamma", 0.0))), repr(float(c["tau"])),
                    "" if c["error"] is None else repr(float(c["error"])),
                    repr(float(cfg.get("error_norm", 0.0))), c["status"],
                ])
        paths.append(path)

    if "json" in formats:
        path = os.path.join(out_dir, f"{base}.json")
        with open(path, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        paths.append(path)

    if report.cells:
        path = os.path.join(out_dir, f"{base}_plot.csv")
        schemes = sorted({c["scheme"] for c in report.cells})
        taus = sorted({c["tau"] for c in report.cells}, reverse=True)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["tau"] + schemes)
            for tau in taus:
                row = [repr(float(tau))]
                for scheme in schemes:
                    errs = [c["error"] for c in report.cells
                            if c["scheme"] == scheme and c["tau"] == tau
                            and c["status"] == "ok" and c["error"] is not None]
                    row.append(repr(float(np.median(errs))) if errs else "")
                writer.writerow(row)
        paths.append(path)
    return paths
