"""Command-line front end.

    kvnlab run CONFIG [--key value ...]
    kvnlab compare A B [B ...] --tol T [--column P_raw]

Configs are flat ``key = value`` files; ``#`` starts a comment. Each run
writes one CSV plus a ``.meta.json`` sidecar with every parameter and any
warnings raised along the way.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, _backend
from .classical import (MASS_LOSS_TOLERANCE, HamiltonianSpec, apply_free_kernel,
                        commensurate_grid, decoupling_check, evolve_characteristics, evolve_free)
from .core import (PHASE_FLOOR, GaussianParams, Grid1D, PhaseSpaceGrid, WaveFunction2D, gaussian_moments,
                   gaussian_qp, make_gaussian_qp, make_gaussian_x, position_stats)
from .errors import KvnError, ResolutionError
from .quantum import QuantumParams, evolve_gaussian_free, propagate_kernel
from .representation import (evolve_free_lambda, gaussian_lambda_closed_form, mean_p_in_lambda,
                             moments_lambda, to_lambda_p, uncertainty_product)
from .twoslit import (FRINGE_WINDOW, SlitGeometry, SlitsOpen, analyze_minima, classical_two_slit,
                      quantum_two_slit)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

_GRID2D = {"q_min": -12.0, "q_max": 12.0, "p_min": -8.0, "p_max": 8.0, "n_q": 512, "n_p": 512}
_SCREEN = {"x_min": -19.0, "x_max": 19.0, "n_x": 3801}
_SLITS = {"x_A": 1.0, "delta": 0.1, "y_F": 1.0, "y_S": 2.0, "p_y0": 1.0, "m": 1.0}

EXPERIMENTS = {
    "ClassicalGaussian": {"a": 1.0, "b": 1.0, "p_i": 0.5, "m": 1.0, "t": 2.0,
                          "backend": "grid", **_GRID2D},
    "QuantumGaussian": {"a": 1.0, "p_i": 0.0, "hbar": 1.0, "m": 1.0, "t": 2.0,
                        "method": "closed", "x_min": -12.0, "x_max": 12.0, "n_x": 512},
    "LambdaRep": {"a": 1.0, "b": 1.0, "p_i": 0.5, "m": 1.0, "t": 1.0, **_GRID2D},
    "Decoupling": {"a": 1.0, "b": 1.0, "m": 1.0, "t": 1.0, "g": 0.3,
                   "q_half": 12.0, "p_half": 6.0, "n_p": 257},
    "TwoSlitClassical": {"a": 1.0, "b": 1.0, "p_i": 0.0, "open": "both", **_SLITS, **_SCREEN},
    "TwoSlitQuantum": {"a": 1.0, "hbar": 1.0, "open": "both", **_SLITS, "x_A": 0.5, **_SCREEN},
    "KvNPostulateCheck": {"a": 1.0, "b": 1.0, "p_i": 0.5, "m": 1.0, "times": "0.5,1,2",
                          "q_half": 12.0, "p_half": 6.0, "n_p": 257},
}
_STRING_KEYS = {"backend", "method", "open", "times"}
_COMMON_KEYS = {"experiment", "output", "svg"}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict
    output: Path
    svg: bool = False

    @classmethod
    def from_mapping(cls, raw: dict[str, str]) -> "ExperimentConfig":
        raw = dict(raw)
        name = raw.pop("experiment", None)
        if name not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {sorted(EXPERIMENTS)}, got {name!r}")
        output = raw.pop("output", None)
        if not output:
            raise ConfigError("missing required key 'output'")
        svg = raw.pop("svg", "0").lower() in ("1", "true", "yes")
        defaults = EXPERIMENTS[name]
        unknown = sorted(set(raw) - set(defaults))
        if unknown:
            raise ConfigError(f"unknown keys for {name}: {', '.join(unknown)}")
        params = dict(defaults)
        for key, value in raw.items():
            if key in _STRING_KEYS:
                params[key] = value
            elif isinstance(defaults[key], int):
                try:
                    params[key] = int(value)
                except ValueError:
                    raise ConfigError(f"{key} must be an integer, got {value!r}") from None
            else:
                try:
                    params[key] = float(value)
                except ValueError:
                    raise ConfigError(f"{key} must be a number, got {value!r}") from None
        return cls(name, params, Path(output), svg)


def read_config(path: Path) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def _grid2d(p) -> PhaseSpaceGrid:
    return PhaseSpaceGrid(p["q_min"], p["q_max"], p["p_min"], p["p_max"], p["n_q"], p["n_p"])


def _geometry(p) -> SlitGeometry:
    return SlitGeometry(p["x_A"], p["delta"], p["y_F"], p["y_S"], p["p_y0"], p["m"])


def _screen(p) -> np.ndarray:
    return np.linspace(p["x_min"], p["x_max"], p["n_x"])


def _open(p) -> SlitsOpen:
    try:
        return SlitsOpen(p["open"].lower())
    except ValueError:
        raise ConfigError(f"open must be one of both/first/second, got {p['open']!r}") from None


def _classical_gaussian(p):
    params = GaussianParams(p["a"], p["b"], p["p_i"], p["m"])
    psi = make_gaussian_qp(params, _grid2d(p))
    if p["backend"] == "grid":
        out = evolve_free(psi, p["t"], p["m"])
    elif p["backend"] == "characteristics":
        out = evolve_characteristics(psi, HamiltonianSpec.free(p["m"]), p["t"])
    else:
        raise ConfigError(f"backend must be grid or characteristics, got {p['backend']!r}")
    mom = gaussian_moments(out)
    return ["t", "q_mean", "p_mean", "q_var", "p_var"], [[p["t"], mom["q_mean"], mom["p_mean"],
                                                         mom["q_var"], mom["p_var"]]]


def _quantum_gaussian(p):
    qp = QuantumParams(p["hbar"], p["m"])
    grid = Grid1D(p["x_min"], p["x_max"], p["n_x"])
    if p["method"] == "closed":
        psi = evolve_gaussian_free(p["a"], p["p_i"], p["t"], qp, grid)
    elif p["method"] == "kernel":
        psi = propagate_kernel(make_gaussian_x(p["a"], p["p_i"], p["hbar"], grid), 0.0, p["t"], qp)
    else:
        raise ConfigError(f"method must be closed or kernel, got {p['method']!r}")
    mean, var = position_stats(psi)
    return ["t", "x_mean", "x_var"], [[p["t"], mean, var]]


def _lambda_rep(p):
    params = GaussianParams(p["a"], p["b"], p["p_i"], p["m"])
    lam = to_lambda_p(make_gaussian_qp(params, _grid2d(p)))
    out = evolve_free_lambda(lam, p["t"], p["m"])
    Q, L = out.grid.mesh()
    exact = gaussian_lambda_closed_form(Q, L, p["a"], p["b"], p["p_i"], p["t"], p["m"])
    mom = moments_lambda(out)
    cols = ["t", "p_mean", "uncertainty", "q_mean", "q_var", "p_var", "closed_form_error"]
    return cols, [[p["t"], mean_p_in_lambda(out).value, uncertainty_product(lam), mom["q_mean"],
                   mom["q_var"], mom["p_var"], float(np.abs(out.amplitudes - exact).max())]]


def _postulate_grid(p, times):
    # dp * t/m must be an integer multiple of dq for every requested t
    ratio = 1
    while not all(abs(ratio * t / p["m"] - round(ratio * t / p["m"])) < 1e-12 for t in times):
        ratio += 1
        if ratio > 64:
            raise ConfigError("times have no common lattice ratio <= 64")
    return commensurate_grid(p["q_half"], p["p_half"], p["n_p"], ratio)


def _decoupling(p):
    grid = _postulate_grid(p, [p["t"]])
    Q, P = grid.mesh()
    F0 = gaussian_qp(GaussianParams(p["a"], p["b"], 0.0, p["m"]), Q, P)
    rep = decoupling_check(F0, p["g"] * Q * P, grid, HamiltonianSpec.free(p["m"]), p["t"])
    return ["t", "modulus_diff", "phase_diff"], [[p["t"], rep.modulus_diff, rep.phase_diff]]


def _postulate(p):
    try:
        times = [float(s) for s in p["times"].split(",")]
    except ValueError:
        raise ConfigError(f"times must be a comma-separated list, got {p['times']!r}") from None
    grid = _postulate_grid(p, times)
    params = GaussianParams(p["a"], p["b"], p["p_i"], p["m"])
    Q, P = grid.mesh()
    psi = WaveFunction2D(grid, gaussian_qp(params, Q, P) * np.exp(0.4j * Q * P + 0.7j * Q))
    rho = psi.replace(psi.density())
    rows = []
    for t in times:
        lhs = apply_free_kernel(psi, t, p["m"]).density()
        rhs = apply_free_kernel(rho, t, p["m"]).amplitudes.real
        rows.append([t, float(np.abs(lhs - rhs).max())])
    return ["t", "sup_diff"], rows


def _two_slit_classical(p):
    params = GaussianParams(p["a"], p["b"], p["p_i"], p["m"])
    c = classical_two_slit(params, _geometry(p), _screen(p), open_=_open(p))
    return ["x", "P", "P_raw"], np.column_stack([c.x, c.P, c.raw]).tolist()


def _two_slit_quantum(p):
    qp = QuantumParams(p["hbar"], p["m"])
    c = quantum_two_slit(p["a"], _geometry(p), _screen(p), qp, _open(p))
    return ["x", "P", "P_raw", "cross"], np.column_stack([c.x, c.P, c.raw, c.cross]).tolist()


RUNNERS = {
    "ClassicalGaussian": _classical_gaussian,
    "QuantumGaussian": _quantum_gaussian,
    "LambdaRep": _lambda_rep,
    "Decoupling": _decoupling,
    "TwoSlitClassical": _two_slit_classical,
    "TwoSlitQuantum": _two_slit_quantum,
    "KvNPostulateCheck": _postulate,
}


def format_csv(columns, rows) -> str:
    lines = [",".join(columns)]
    lines += [",".join(repr(float(v)) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def render_svg(columns, rows, width=640, height=400) -> str:
    """Polyline of the second column against the first."""
    data = np.asarray(rows, dtype=float)
    x, y = data[:, 0], data[:, 1]
    span_x = (x.max() - x.min()) or 1.0
    span_y = (y.max() - y.min()) or 1.0
    px = 20 + (x - x.min()) / span_x * (width - 40)
    py = height - 20 - (y - y.min()) / span_y * (height - 40)
    pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
            f'<title>{columns[1]} vs {columns[0]}</title>'
            f'<polyline fill="none" stroke="black" points="{pts}"/></svg>\n')


def run(config: ExperimentConfig) -> int:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        columns, rows = RUNNERS[config.experiment](config.params)
    meta = {
        "experiment": config.experiment,
        "parameters": config.params,
        "columns": columns,
        "kvnlab_version": __version__,
        "kernel_backend": _backend.BACKEND,
        "tolerances": {"quadrature_rtol": 1e-10, "nodes_per_wavelength": 16,
                       "mass_loss": MASS_LOSS_TOLERANCE, "phase_floor": PHASE_FLOOR},
        "warnings": [str(w.message) for w in caught],
    }
    if config.experiment == "TwoSlitQuantum":
        meta["minima_window"] = list(FRINGE_WINDOW)
        x = np.asarray(rows)[:, 0]
        if x.min() <= FRINGE_WINDOW[0] and x.max() >= FRINGE_WINDOW[1]:
            c = quantum_two_slit(config.params["a"], _geometry(config.params), x,
                                 QuantumParams(config.params["hbar"], config.params["m"]),
                                 _open(config.params))
            rep = analyze_minima(c, FRINGE_WINDOW)
            meta["minima_count"] = rep.count
            meta["minima_mean_spacing"] = None if math.isnan(rep.mean_spacing) else rep.mean_spacing
    out = config.output
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(format_csv(columns, rows))
    out.with_name(out.name + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    if config.svg:
        out.with_suffix(".svg").write_text(render_svg(columns, rows))
    return EXIT_OK


def read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader])
    return header, data


@dataclass
class CompareReport:
    sup: float
    l2: float
    passed: bool
    max_cross: float | None = None


class GridMismatch(ValueError):
    pass


def compare(path_a, paths_b, tol: float, column: str | None = None) -> CompareReport:
    """Difference between one CSV and the column-wise sum of one or more others."""
    if isinstance(paths_b, (str, Path)):
        paths_b = [paths_b]
    head_a, a = read_csv(Path(path_a))
    total = None
    for pb in paths_b:
        head_b, b = read_csv(Path(pb))
        if head_b != head_a:
            raise GridMismatch(f"column headers differ: {head_a} vs {head_b}")
        if b.shape != a.shape or not np.array_equal(b[:, 0], a[:, 0]):
            raise GridMismatch(f"{pb} is sampled on a different {head_a[0]} grid")
        total = b.copy() if total is None else total + b
    col = column or (head_a[1] if len(head_a) > 1 else head_a[0])
    if col not in head_a:
        raise GridMismatch(f"no column {col!r} in {head_a}")
    j = head_a.index(col)
    diff = a[:, j] - total[:, j]
    sup = float(np.abs(diff).max()) if len(diff) else 0.0
    x = a[:, 0]
    if len(x) > 1 and np.all(np.diff(x) > 0):
        l2 = math.sqrt(float(np.sum(0.5 * (diff[1:]**2 + diff[:-1]**2) * np.diff(x))))
    else:
        l2 = float(np.sqrt(np.sum(diff**2)))
    max_cross = float(np.abs(a[:, head_a.index("cross")]).max()) if "cross" in head_a else None
    return CompareReport(sup, l2, sup <= tol, max_cross)


def _parse_overrides(extra: list[str]) -> dict[str, str]:
    out = {}
    it = iter(extra)
    for token in it:
        if not token.startswith("--"):
            raise ConfigError(f"unexpected argument {token!r}")
        key = token[2:]
        if "=" in key:
            key, value = key.split("=", 1)
        else:
            try:
                value = next(it)
            except StopIteration:
                raise ConfigError(f"option --{key} needs a value") from None
        out[key] = value
    return out


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="kvnlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one experiment from a config file")
    p_run.add_argument("config", type=Path)
    p_cmp = sub.add_parser("compare", help="compare CSV A with B (or the sum of several B)")
    p_cmp.add_argument("a", type=Path)
    p_cmp.add_argument("b", type=Path, nargs="+")
    p_cmp.add_argument("--tol", type=float, required=True)
    p_cmp.add_argument("--column")
    args, extra = parser.parse_known_args(argv)

    if args.command == "compare":
        if extra:
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
        try:
            rep = compare(args.a, args.b, args.tol, args.column)
        except GridMismatch as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        line = f"sup={rep.sup:.3e} l2={rep.l2:.3e} tol={args.tol:g} {'PASS' if rep.passed else 'FAIL'}"
        if rep.max_cross is not None:
            line += f" max_cross={rep.max_cross:.3e}"
        print(line)
        return EXIT_OK if rep.passed else EXIT_FAIL

    try:
        raw = read_config(args.config)
        raw.update(_parse_overrides(extra))
        config = ExperimentConfig.from_mapping(raw)
        return run(config)
    except ResolutionError as exc:
        print(f"numerical resolution error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, KvnError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
