"""Model configs, pipeline orchestration, sweeps and report emission."""
from __future__ import annotations

import copy
import csv
import json
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, List, Optional

import jsonschema
import numpy as np
from scipy.integrate import quad

from .errors import ConfigError, DerivativeInconsistent, InvalidModel, IoError, NonPhysicalCrossSection
from .recombination import (Amplitude, AmplitudeTerm, ClassEntry, PhotonGrid, RadRecModel,
                            assemble_cross_section, extract_amplitude, lowest_order_coefficient,
                            se_bound_coefficient, se_free_coefficient, vertex_coefficient)
from .singularity import delta_gamma
from .spectral import EnergyDependentOperator, Spectrum, build_spectrum, operator_matrix

SCHEMA_VERSION = 1

_number = {"type": "number"}
_complex = {"oneOf": [_number, {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}]}
_matrix = {"type": "array", "items": {"type": "array", "items": _complex}}
_vector = {"oneOf": [
    {"type": "array", "items": _complex},
    {"type": "object", "required": ["bound", "continuum_poly"], "additionalProperties": False,
     "properties": {"bound": {"type": "array", "items": _complex},
                    "continuum_poly": {"type": "array", "items": _complex}}},
]}
_grid = {"type": "object", "additionalProperties": False,
         "properties": {"min": _number, "max": _number,
                        "n_points": {"type": "integer", "minimum": 2},
                        "rule": {"enum": ["trapezoid", "gauss"]},
                        "nodes": {"type": "array", "items": _number}}}
_operator = {
    "type": "object", "required": ["type"],
    "properties": {
        "type": {"enum": ["zero", "constant", "linear", "linear-in-E", "separable",
                          "separable-rank-1", "sampled"]},
        "matrix": _matrix, "intercept": _matrix, "slope": {"oneOf": [_matrix, _number]},
        "derivative": _matrix, "vector": _vector, "scale": _number,
        "matrices": {"type": "array", "items": _matrix},
    },
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "spectrum", "initial_state", "capture_target", "v_i",
                 "photons", "sigma"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "spectrum": {"type": "object", "additionalProperties": False,
                     "properties": {"bound": {"type": "array", "items": _number},
                                    "continuum": _grid,
                                    "degeneracy_tol": {"type": "number", "exclusiveMinimum": 0}}},
        "initial_state": {"oneOf": [{"type": "integer", "minimum": 0},
                                    {"type": "object", "required": ["energy"],
                                     "properties": {"energy": _number}}]},
        "capture_target": {"type": "integer", "minimum": 0},
        "v_i": {"type": "number", "exclusiveMinimum": 0},
        "vertex_sign": {"enum": [-1, 1]},
        "photons": {"type": "object", "required": ["coupling"], "additionalProperties": False,
                    "properties": {"grid": _grid,
                                   "modes": {"type": "object", "required": ["omega", "weight"],
                                             "properties": {"omega": {"type": "array", "items": _number},
                                                            "weight": {"type": "array", "items": _number}}},
                                   "coupling": _operator}},
        "sigma": _operator,
        "lambda": _operator,
    },
}


@dataclass
class RunConfig:
    model_path: Optional[str] = None
    output_path: Optional[str] = None
    format: str = "json"
    eta: Optional[float] = None
    fd_step: Optional[float] = None
    sweep: Optional[dict] = None
    seed: int = 0

    def __post_init__(self):
        if self.format not in ("json", "csv"):
            raise ConfigError("format", f"must be json or csv, got {self.format!r}")
        if self.sweep is not None and not self.sweep.get("values"):
            raise ConfigError("sweep.values", "must be a nonempty list")


# --- loading ----------------------------------------------------------------

def _c(x) -> complex:
    return complex(x[0], x[1]) if isinstance(x, list) else complex(x)


def _mat(raw, dim: int, path: str) -> np.ndarray:
    m = np.array([[_c(x) for x in row] for row in raw], dtype=complex)
    if m.shape != (dim, dim):
        raise ConfigError(path, f"expected a {dim}x{dim} matrix, got shape {m.shape}")
    return operator_matrix(m)


def _vec(raw, spectrum: Spectrum, path: str) -> np.ndarray:
    dim = spectrum.dimension
    if isinstance(raw, dict):
        bound = [_c(x) for x in raw["bound"]]
        if len(bound) != len(spectrum.bound_ids):
            raise ConfigError(f"{path}.bound", f"expected {len(spectrum.bound_ids)} entries")
        poly = [_c(x) for x in raw["continuum_poly"]]
        x = spectrum.continuum_nodes
        cont = sum(c * x ** k for k, c in enumerate(poly)) * np.sqrt(spectrum.continuum_weights)
        v = np.concatenate([np.asarray(bound, dtype=complex), np.asarray(cont, dtype=complex)])
    else:
        v = np.array([_c(x) for x in raw], dtype=complex)
    if v.shape != (dim,):
        raise ConfigError(path, f"expected {dim} entries, got {v.size}")
    return v


_ALIASES = {"linear-in-E": "linear", "separable-rank-1": "separable"}


def _operator(raw: dict, spectrum: Spectrum, path: str, tag: str, window=(-np.inf, np.inf),
              modes: Optional[np.ndarray] = None) -> EnergyDependentOperator:
    dim = spectrum.dimension
    kind = _ALIASES.get(raw["type"], raw["type"])

    def need(key):
        if key not in raw:
            raise ConfigError(f"{path}.{key}", f"required for type {kind!r}")
        return raw[key]

    if kind == "zero":
        op = EnergyDependentOperator.constant_op(np.zeros((dim, dim)), tag)
    elif kind == "constant":
        op = EnergyDependentOperator.constant_op(_mat(need("matrix"), dim, f"{path}.matrix"), tag)
    elif kind == "linear":
        m0 = _mat(need("intercept"), dim, f"{path}.intercept")
        if not isinstance(need("slope"), list):
            raise ConfigError(f"{path}.slope", "must be a matrix for a linear operator")
        m1 = _mat(raw["slope"], dim, f"{path}.slope")
        op = EnergyDependentOperator.linear(m0, m1, tag)
        if "derivative" in raw:
            d = _mat(raw["derivative"], dim, f"{path}.derivative")
            op = replace(op, derivative=lambda e: d)
    elif kind == "separable":
        v = _vec(need("vector"), spectrum, f"{path}.vector")
        outer = operator_matrix(np.outer(v, v.conj()), hermitian=True)
        scale = float(raw.get("scale", 1.0))
        slope = float(raw.get("slope", 0.0))
        op = EnergyDependentOperator(lambda e: (scale + slope * e) * outer, lambda e: slope * outer, tag)
    elif kind == "sampled":
        if modes is None:
            raise ConfigError(f"{path}.type", "sampled operators are only allowed for the photon coupling")
        mats = need("matrices")
        if len(mats) != modes.size:
            raise ConfigError(f"{path}.matrices", f"need one matrix per photon mode ({modes.size})")
        arr = [_mat(m, dim, f"{path}.matrices[{i}]") for i, m in enumerate(mats)]
        return PhotonGrid.sampled(modes, np.ones_like(modes), arr, tag).coupling
    else:  # pragma: no cover - schema rejects it
        raise ConfigError(f"{path}.type", f"unknown operator type {kind!r}")
    return replace(op, window=window)


def _validate_schema(doc: dict):
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
        raise ConfigError(path, err.message)


def model_from_dict(doc: dict, check_derivatives: bool = True) -> RadRecModel:
    """Validate a parsed config document and build the model."""
    _validate_schema(doc)
    sp = doc["spectrum"]
    try:
        spectrum = build_spectrum(sp.get("bound", []), sp.get("continuum"))
    except InvalidModel as exc:
        raise InvalidModel(f"spectrum: {exc}") from None
    tol = sp.get("degeneracy_tol", 1e-9)

    init = doc["initial_state"]
    if isinstance(init, dict):
        cont = spectrum.continuum_ids
        if not cont:
            raise InvalidModel("initial_state: spectrum has no continuum")
        p = cont[int(np.argmin(np.abs(spectrum.continuum_nodes - init["energy"])))]
    else:
        p = init

    ph = doc["photons"]
    if "modes" in ph:
        omegas = np.asarray(ph["modes"]["omega"], dtype=float)
        weights = np.asarray(ph["modes"]["weight"], dtype=float)
        if omegas.shape != weights.shape:
            raise ConfigError("$.photons.modes", "omega and weight lengths differ")
    elif "grid" in ph:
        g = ph["grid"]
        try:
            tmp = build_spectrum([], g)
        except InvalidModel as exc:
            raise InvalidModel(f"photons.grid: {exc}") from None
        omegas, weights = tmp.continuum_nodes, tmp.continuum_weights
    else:
        raise ConfigError("$.photons", "needs either 'grid' or 'modes'")
    window = (float(omegas[0]), float(omegas[-1]))
    coupling = _operator(ph["coupling"], spectrum, "$.photons.coupling", "A", window, omegas)
    sigma = _operator(doc["sigma"], spectrum, "$.sigma", "Sigma")
    lam = _operator(doc.get("lambda", {"type": "zero"}), spectrum, "$.lambda", "Lambda")

    model = RadRecModel(spectrum, PhotonGrid(omegas, weights, coupling), sigma, lam,
                        float(doc["v_i"]), int(doc["capture_target"]), int(p),
                        int(doc.get("vertex_sign", -1)), float(tol))
    if check_derivatives:
        check_model_derivatives(model)
    return model


def check_model_derivatives(model: RadRecModel) -> Dict[str, float]:
    """FD cross-check of every analytic derivative at the energies the pipeline uses."""
    out = {}
    w = model.omega_star
    lo, hi = model.photons.coupling.window
    if lo < w < hi and w - 1e-4 * max(1, w) > lo and w + 1e-4 * max(1, w) < hi:
        out["A"] = model.photons.coupling.check_derivative(w)
    for name, op, energies in (("Sigma", model.sigma, (model.eps_a, model.eps_p)),
                               ("Lambda", model.lambda_vx, (model.eps_p,))):
        for e in energies:
            out[f"{name}@{e:g}"] = op.check_derivative(e)
    return out


def load_model(path: str, check_derivatives: bool = True) -> RadRecModel:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON: {exc}") from None
    return model_from_dict(doc, check_derivatives)


# --- pipeline ---------------------------------------------------------------

@dataclass
class ContributionReport:
    omega_star: float
    entries: List[ClassEntry]
    cross_section: float
    dk: float
    v_i: float
    amplitudes: Dict[int, Amplitude]
    warnings: List[str] = field(default_factory=list)

    @property
    def total_coefficient(self) -> float:
        return float(sum(e.coefficient for e in self.entries))

    def entry(self, label: str) -> ClassEntry:
        for e in self.entries:
            if e.label == label:
                return e
        raise KeyError(label)

    def class_cross_section(self, entry: ClassEntry) -> float:
        return (2 * np.pi) ** 3 / self.v_i * entry.coefficient * self.dk


def _with_fd_step(model: RadRecModel, h: float) -> RadRecModel:
    ph = model.photons
    return replace(model,
                   photons=PhotonGrid(ph.omegas, ph.weights, replace(ph.coupling, fd_step=h)),
                   sigma=replace(model.sigma, fd_step=h),
                   lambda_vx=replace(model.lambda_vx, fd_step=h))


def _is_zero(op: EnergyDependentOperator, energies) -> bool:
    return all(not np.any(op(e)) for e in energies) and (
        op.derivative is None or all(not np.any(op.derivative(e)) for e in energies))


def run_pipeline(model: RadRecModel, config: Optional[RunConfig] = None) -> ContributionReport:
    """All diagram classes, the cross section and the amplitude, deterministically.

    Classes whose insertion operators vanish identically are left out of the
    report (a Sigma = Lambda = 0 model reports only the lowest order).
    """
    config = config or RunConfig()
    if config.fd_step is not None:
        model = _with_fd_step(model, config.fd_step)
    energies = (model.eps_a, model.eps_p)
    entries = [lowest_order_coefficient(model)]
    if not _is_zero(model.sigma, energies):
        entries.append(se_bound_coefficient(model))
    if not _is_zero(model.lambda_vx, energies):
        entries.append(vertex_coefficient(model))
    if not _is_zero(model.sigma, energies):
        entries.append(se_free_coefficient(model, eta=config.eta))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NonPhysicalCrossSection)
        dk = model.photons.weight_at(model.omega_star)
        sigma = assemble_cross_section(entries, model, dk)
    amps = extract_amplitude(model, eta=config.eta)
    return ContributionReport(model.omega_star, entries, float(sigma), dk, model.v_i, amps,
                              [str(w.message) for w in caught])


# --- serialisation ----------------------------------------------------------

def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def report_to_dict(report: ContributionReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "omega_star": report.omega_star,
        "dk": report.dk,
        "v_i": report.v_i,
        "classes": [{"label": e.label, "coefficient": e.coefficient, "omega_star": e.omega_star,
                     "dsigma": report.class_cross_section(e),
                     "terms": {k: _pair(v) for k, v in e.terms.items()},
                     "extra": {k: _pair(v) for k, v in e.extra.items()}}
                    for e in report.entries],
        "total_coefficient": report.total_coefficient,
        "cross_section": report.cross_section,
        "amplitudes": [{"channel": a.channel, "total": _pair(a.total),
                        "terms": [{"name": t.name, "factor": str(t.factor), "value": _pair(t.value)}
                                  for t in a.terms]}
                       for a in report.amplitudes.values()],
        "warnings": list(report.warnings),
    }


def report_from_dict(doc: dict) -> ContributionReport:
    entries = [ClassEntry(c["label"], c["coefficient"], {k: complex(*v) for k, v in c["terms"].items()},
                          c["omega_star"], {k: complex(*v) for k, v in c.get("extra", {}).items()})
               for c in doc["classes"]]
    amps = {a["channel"]: Amplitude(a["channel"], [AmplitudeTerm(t["name"], Fraction(t["factor"]),
                                                                 complex(*t["value"]))
                                                   for t in a["terms"]])
            for a in doc["amplitudes"]}
    return ContributionReport(doc["omega_star"], entries, doc["cross_section"], doc["dk"], doc["v_i"],
                              amps, list(doc.get("warnings", [])))


CSV_COLUMNS = ["class", "channel", "omega", "term", "re", "im", "coefficient", "dsigma"]


def report_rows(report: ContributionReport) -> List[list]:
    channel = ";".join(str(q) for q in report.amplitudes)
    rows = []
    for e in report.entries:
        dsig = report.class_cross_section(e)
        for name, val in e.terms.items():
            rows.append([e.label, channel, repr(e.omega_star), name, repr(complex(val).real),
                         repr(complex(val).imag), repr(e.coefficient), repr(dsig)])
    return rows


def emit_report(report: Optional[ContributionReport], fmt: str, path: str):
    """Write the report as JSON (sorted keys, full precision) or CSV."""
    try:
        with open(path, "w", newline="") as fh:
            if fmt == "json":
                doc = report_to_dict(report) if report is not None else {}
                json.dump(doc, fh, sort_keys=True, indent=2)
                fh.write("\n")
            elif fmt == "csv":
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(CSV_COLUMNS)
                if report is not None:
                    w.writerows(report_rows(report))
            else:
                raise ConfigError("format", f"must be json or csv, got {fmt!r}")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


# --- sweeps -----------------------------------------------------------------

SWEEP_PARAMS = ("gamma", "eta", "grid_n", "epsilon")
SWEEP_COLUMNS = ["param", "value", "total_coefficient", "cross_section", "amplitude_sq", "residual"]


def worker_count() -> int:
    env = os.environ.get("RADREC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError("RADREC_THREADS", f"not an integer: {env!r}") from None
    return os.cpu_count() or 1


def smeared_lowest_order(model: RadRecModel, gamma: float) -> float:
    """Lowest-order coefficient with the energy delta replaced by a Lorentzian of width gamma.

    ``int dw Delta_gamma(omega* - w) sum_q |A_qp(w)|^2`` over the photon window,
    by adaptive quadrature on the interpolated coupling.  Tends to the exact
    lowest order as gamma -> 0, with O(gamma) bias from the truncated tails.
    """
    p = model.initial
    targets = model.targets()
    A = model.photons.coupling
    lo, hi = model.photons.omegas[0], model.photons.omegas[-1]
    w0 = model.omega_star

    def integrand(w):
        a = A(w)
        return float(delta_gamma(w0 - w, gamma)) * sum(abs(a[q, p]) ** 2 for q in targets)

    pts = [w0 + k * gamma for k in (-10, -1, 0, 1, 10) if lo < w0 + k * gamma < hi]
    val, _ = quad(integrand, lo, hi, points=pts, limit=500, epsabs=1e-14, epsrel=1e-12)
    return float(val)


def _sweep_point(doc: dict, param: str, value: float) -> dict:
    cfg = RunConfig()
    if param == "grid_n":
        doc = copy.deepcopy(doc)
        doc["photons"]["grid"]["n_points"] = int(value)
    model = model_from_dict(doc)
    if param == "epsilon":
        model = model.scaled(value)
    if param == "eta":
        cfg = RunConfig(eta=value)
    report = run_pipeline(model, cfg)
    amp_sq = float(sum(abs(a.total) ** 2 for a in report.amplitudes.values()))
    row = {"param": param, "value": value,
           "total_coefficient": report.total_coefficient,
           "cross_section": report.cross_section,
           "amplitude_sq": amp_sq,
           "residual": abs(amp_sq - report.total_coefficient)}
    if param == "gamma":
        row["total_coefficient"] = smeared_lowest_order(model, value)
        row["residual"] = abs(row["total_coefficient"] - report.entry("lowest").coefficient)
    return row


def sweep(doc: dict, param: str, values) -> List[dict]:
    """Evaluate the pipeline across ``values`` of ``param``; rows keep input order.

    ``epsilon`` scales Sigma and Lambda, ``eta`` switches the free-electron
    resolvent to the regularised kernel, ``grid_n`` rebuilds the photon grid and
    ``gamma`` replaces the energy delta by a Lorentzian (residual against the
    exact lowest order).
    """
    if param not in SWEEP_PARAMS:
        raise ConfigError("sweep.param", f"must be one of {SWEEP_PARAMS}")
    values = list(values)
    if not values:
        raise ConfigError("sweep.values", "must be a nonempty list")
    if param == "grid_n" and "grid" not in doc.get("photons", {}):
        raise ConfigError("$.photons.grid", "grid_n sweep refines the photon grid; none given")
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(lambda v: _sweep_point(doc, param, v), values))


def emit_sweep(rows: List[dict], fmt: str, path: str):
    try:
        with open(path, "w", newline="") as fh:
            if fmt == "json":
                json.dump(rows, fh, sort_keys=True, indent=2)
                fh.write("\n")
            else:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(SWEEP_COLUMNS)
                for r in rows:
                    w.writerow([r["param"]] + [repr(r[c]) for c in SWEEP_COLUMNS[1:]])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
