"""Experiment drivers behind the command line: enclosures, convergence, sweeps, self-check.

Every result row carries the enclosure kind, the source point z, the
residual certificate and the a-priori provenance label.  Rows are plain
dicts with a fixed column order so they serialise identically to CSV and
JSON; floats are written with 17 significant digits.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .discretization import (
    PencilMatrices, QuadratureSpec, assemble_pencil, assemble_pencil_oracle, build_mesh,
    mesh_for_width,
)
from .enclosure import AprioriSegment, Enclosure, basic_enclosure, best_enclosure, disk_contains
from .errors import EmptySpectrum, KNDiracError, NegativeDiscriminant
from .operator_model import (
    OperatorParams, exact_eigenvalue_equal_coupling, predicted_rate, validate_params,
)
from .quadratic_spectrum import (
    ConjugatePair, SecondOrderSpectrum, SolverConfig, extract_pairs,
    nearest_pair, solve_spec2, tau_sym,
)

SCHEMA_VERSION = 1
COARSE_H = 0.05
DESK_H_GRID = (0.1, 0.05, 0.025, 0.0125)
PRODUCTION_H_GRID = tuple(10.0 ** e for e in np.linspace(-3, -2, 6))
CONVERGENCE_COUPLING = 0.25


def fmt(x) -> str:
    """Canonical text form of one cell."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _float(s: str):
    return None if s == "" else float(s)


# -- targets -------------------------------------------------------------------

def parse_target(token):
    """A real number or an eigenvalue index written ``n=K`` (K nonzero)."""
    if isinstance(token, (int, float)) and not isinstance(token, bool):
        return float(token)
    tok = str(token).strip()
    if tok.startswith("n="):
        k = int(tok[2:])
        if k == 0:
            raise ValueError("eigenvalue index must be nonzero")
        return tok
    return float(tok.replace("−", "-"))


def parse_targets(text: str):
    return [parse_target(t) for t in text.replace(";", ",").split(",") if t.strip()]


def target_index(target) -> int | None:
    return int(target[2:]) if isinstance(target, str) else None


def eigen_pairs(pairs, h: float):
    """Pairs approximating eigenvalues; spurious pairs have heights of order 1/h."""
    return [q for q in pairs if q.height < 0.25 / h]


def pick_index(pairs, k: int, h: float) -> ConjugatePair:
    """The k-th eigenvalue approximation: k >= 1 counts from 0 upwards, k <= -1 downwards."""
    cand = eigen_pairs(pairs, h)
    if k > 0:
        side = sorted((q for q in cand if q.center >= 0), key=lambda q: q.center)
    else:
        side = sorted((q for q in cand if q.center < 0), key=lambda q: -q.center)
    if len(side) < abs(k):
        raise EmptySpectrum(f"eigenvalue n={k} is not resolved at h={h:g}")
    return side[abs(k) - 1]


# -- run records -----------------------------------------------------------------

RUN_COLUMNS = (
    "kappa", "am", "aw", "h", "n_elements", "target", "target_value", "kind",
    "lower", "upper", "center", "height", "z_re", "z_im", "zbar_re", "zbar_im",
    "segment_a", "segment_b", "apriori_label", "residual_certificate", "wall_time", "error",
)


@dataclass
class RunRecord:
    params: OperatorParams
    h: float
    target: object                        # float or "n=K"
    enclosure: Enclosure | None = None
    residual_certificate: float | None = None
    wall_time: float | None = None
    n_elements: int | None = None
    target_value: float | None = None
    error: str | None = None

    def to_row(self) -> dict:
        e = self.enclosure
        seg = e.segment if e is not None else None
        row = {
            "kappa": self.params.kappa, "am": self.params.am, "aw": self.params.aw,
            "h": self.h, "n_elements": self.n_elements, "target": fmt(self.target),
            "target_value": self.target_value,
            "kind": e.kind if e else None,
            "lower": e.lower if e else None, "upper": e.upper if e else None,
            "center": e.source.center if e else None, "height": e.source.height if e else None,
            "z_re": e.source.z_plus.real if e else None, "z_im": e.source.z_plus.imag if e else None,
            "zbar_re": e.source.z_minus.real if e else None,
            "zbar_im": e.source.z_minus.imag if e else None,
            "segment_a": seg.a if seg else None, "segment_b": seg.b if seg else None,
            "apriori_label": (seg.label if seg else "none") if e else None,
            "residual_certificate": self.residual_certificate,
            "wall_time": self.wall_time, "error": self.error,
        }
        return {k: fmt(row[k]) for k in RUN_COLUMNS}

    @classmethod
    def from_row(cls, row: dict) -> "RunRecord":
        g = {k: row.get(k, "") for k in RUN_COLUMNS}
        enc = None
        if g["kind"]:
            seg = None
            if g["segment_a"]:
                seg = AprioriSegment(float(g["segment_a"]), float(g["segment_b"]), g["apriori_label"])
            pair = ConjugatePair(complex(float(g["z_re"]), float(g["z_im"])),
                                 complex(float(g["zbar_re"]), float(g["zbar_im"])))
            enc = Enclosure(float(g["lower"]), float(g["upper"]), g["kind"], pair, seg)
        return cls(
            params=OperatorParams(float(g["kappa"]), float(g["am"]), float(g["aw"])),
            h=float(g["h"]),
            target=parse_target(g["target"]),
            enclosure=enc,
            residual_certificate=_float(g["residual_certificate"]),
            wall_time=_float(g["wall_time"]),
            n_elements=int(g["n_elements"]) if g["n_elements"] else None,
            target_value=_float(g["target_value"]),
            error=g["error"] or None,
        )


# -- table io -------------------------------------------------------------------

def write_table(rows, columns, stream, kind: str, fmt_name: str = "csv") -> None:
    """Write rows (dicts of already formatted cells) as versioned CSV or JSON."""
    schema = f"kndirac.{kind} v{SCHEMA_VERSION}"
    if fmt_name == "csv":
        stream.write(f"# schema: {schema}\n")
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([r[c] for c in columns])
    elif fmt_name == "json":
        stream.write("{\n" f'  "schema": {json.dumps(schema)},\n'
                     f'  "columns": {json.dumps(list(columns))},\n  "rows": [')
        body = []
        for r in rows:
            cells = ", ".join(f"{json.dumps(c)}: {_json_cell(r[c])}" for c in columns)
            body.append("    {" + cells + "}")
        stream.write(("\n" + ",\n".join(body) + "\n  ") if body else "")
        stream.write("]\n}\n")
    else:
        raise ValueError(f"unknown format {fmt_name!r}")


def _json_cell(cell: str) -> str:
    if cell == "":
        return "null"
    if cell in ("true", "false"):
        return cell
    try:
        x = float(cell)
    except ValueError:
        return json.dumps(cell)
    if not math.isfinite(x):
        return json.dumps(cell)
    return cell


def read_table(stream, kind: str):
    """Inverse of write_table; returns rows as dicts of strings."""
    text = stream.read()
    schema = f"kndirac.{kind} v{SCHEMA_VERSION}"
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        if doc.get("schema") != schema:
            raise ValueError(f"expected schema {schema!r}, got {doc.get('schema')!r}")
        return [{k: _cell_from_json(v) for k, v in r.items()} for r in doc["rows"]]
    lines = text.splitlines()
    if not lines or lines[0] != f"# schema: {schema}":
        raise ValueError(f"expected schema line for {schema!r}")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def _cell_from_json(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def write_records(records, stream, fmt_name="csv"):
    write_table([r.to_row() for r in records], RUN_COLUMNS, stream, "runrecord", fmt_name)


def read_records(stream):
    return [RunRecord.from_row(r) for r in read_table(stream, "runrecord")]


# -- enclosures ------------------------------------------------------------------

class Session:
    """Assembled pencil for one parameter set and mesh, with cached spectra."""

    def __init__(self, params: OperatorParams, h: float, nevp: int = 6, rtol: float = 1e-12):
        self.params = validate_params(params)
        self.h = h
        self.mesh = mesh_for_width(h)
        self.nevp, self.rtol = nevp, rtol
        self._pencil = None
        self._coarse = None

    @property
    def pencil(self) -> PencilMatrices:
        if self._pencil is None:
            self._pencil = assemble_pencil(self.params, self.mesh)
        return self._pencil

    def coarse_pairs(self):
        """Full second order spectrum at width max(h, COARSE_H), as pairs."""
        if self._coarse is None:
            if self.mesh.h >= COARSE_H * (1 - 1e-12):
                spec = solve_spec2(self.pencil, SolverConfig("full"))
                self._coarse = (extract_pairs(spec), spec, self.mesh.h)
            else:
                mesh = mesh_for_width(COARSE_H)
                spec = solve_spec2(assemble_pencil(self.params, mesh), SolverConfig("full"))
                self._coarse = (extract_pairs(spec), None, mesh.h)
        return self._coarse

    def shifted(self, shift: float) -> SecondOrderSpectrum:
        return solve_spec2(self.pencil, SolverConfig("shifted", shift=shift, nevp=self.nevp,
                                                     rtol=self.rtol))

    def resolve(self, target):
        """(numeric target, spectrum to read the pair from)."""
        k = target_index(target)
        if k is None:
            return float(target), None
        pairs, spec, hc = self.coarse_pairs()
        value = pick_index(pairs, k, hc).center
        return value, spec


def enclose_one(session: Session, target, segments=(), timings: bool = False) -> RunRecord:
    """One RunRecord; solver and validation errors are recorded, not raised."""
    t0 = time.perf_counter()
    rec = RunRecord(params=session.params, h=session.h, target=target,
                    n_elements=session.mesh.n)
    try:
        value, spec = session.resolve(target)
        rec.target_value = value
        if spec is None:
            spec = session.shifted(value)
        enc = best_enclosure(spec, value, segments)
        rec.enclosure = enc
        rec.residual_certificate = spec.residual_certificate
    except (KNDiracError, ValueError, ArithmeticError) as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
    if timings:
        rec.wall_time = time.perf_counter() - t0
    return rec


def run_enclosures(params: OperatorParams, h: float, targets, segments=(), nevp=6, rtol=1e-12,
                   timings=False):
    session = Session(params, h, nevp=nevp, rtol=rtol)
    return [enclose_one(session, t, segments, timings) for t in targets]


def _map(fn, items, jobs: int):
    items = list(items)
    if jobs and jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# -- convergence -----------------------------------------------------------------

@dataclass
class SlopeEstimate:
    kappa: float
    h_values: list
    residuals: list
    slope: float
    predicted_proven: float
    predicted_conjectured: float
    target: int = 1
    errors: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.h_values) != len(self.residuals):
            raise ValueError("h_values and residuals differ in length")


SLOPE_COLUMNS = ("kappa", "target", "exact", "slope", "predicted_proven", "predicted_conjectured",
                 "n_points", "h_values", "residuals", "errors")


def fit_slope(h_values, residuals) -> float:
    """Least-squares slope of log(residual) against log(h)."""
    if len(h_values) < 3:
        return math.nan
    return float(np.polyfit(np.log(h_values), np.log(residuals), 1)[0])


def convergence_exact(kappa: float, target: int = 1) -> float:
    c = CONVERGENCE_COUPLING
    return exact_eigenvalue_equal_coupling(kappa, c, 1, target)


def _residual_task(args):
    kappa, h, target, nevp, rtol = args
    exact = convergence_exact(kappa, target)
    try:
        p = OperatorParams(kappa, CONVERGENCE_COUPLING, CONVERGENCE_COUPLING)
        mesh = mesh_for_width(h)
        spec = solve_spec2(assemble_pencil(p, mesh),
                           SolverConfig("shifted", shift=exact, nevp=nevp, rtol=rtol))
        pair = nearest_pair(extract_pairs(spec), exact)
        return mesh.h, abs(pair.z_plus - exact), None
    except (KNDiracError, ValueError, ArithmeticError) as exc:
        return h, None, f"h={h:g}: {type(exc).__name__}: {exc}"


def convergence(kappas, h_values, target: int = 1, nevp: int = 6, rtol: float = 1e-12,
                jobs: int = 1):
    """SlopeEstimate per kappa with am = aw = 1/4 against the closed-form eigenvalue.

    Residuals are |z - lambda| for the pair nearest the exact value; the fit
    uses the actual mesh widths pi/n.
    """
    h_values = list(h_values)
    if len(h_values) < 3:
        raise ValueError(f"need at least 3 h values for a slope, got {len(h_values)}")
    for k in kappas:
        if not abs(k) > 0.5:
            raise ValueError(f"convergence study needs |kappa| > 1/2, got {k}")
    tasks = [(k, h, target, nevp, rtol) for k in kappas for h in h_values]
    results = _map(_residual_task, tasks, jobs)
    out = []
    for i, k in enumerate(kappas):
        chunk = results[i * len(h_values):(i + 1) * len(h_values)]
        ok = [(hh, r) for hh, r, e in chunk if e is None]
        hs, rs = [hh for hh, _ in ok], [r for _, r in ok]
        out.append(SlopeEstimate(
            kappa=k, h_values=hs, residuals=rs, slope=fit_slope(hs, rs),
            predicted_proven=predicted_rate(k, "proven"),
            predicted_conjectured=predicted_rate(k, "conjectured"),
            target=target, errors=[e for _, _, e in chunk if e is not None],
        ))
    return out


def slope_row(s: SlopeEstimate) -> dict:
    row = {
        "kappa": fmt(s.kappa), "target": fmt(s.target),
        "exact": fmt(convergence_exact(s.kappa, s.target)), "slope": fmt(s.slope),
        "predicted_proven": fmt(s.predicted_proven),
        "predicted_conjectured": fmt(s.predicted_conjectured),
        "n_points": fmt(len(s.h_values)),
        "h_values": ";".join(fmt(x) for x in s.h_values),
        "residuals": ";".join(fmt(x) for x in s.residuals),
        "errors": " | ".join(s.errors),
    }
    return row


def kappa_grid(lo: float, hi: float, count: int):
    """``count`` equally spaced points strictly inside (lo, hi)."""
    return list(np.linspace(lo, hi, count + 2)[1:-1])


# -- sweep -----------------------------------------------------------------------

def parse_grid(spec: str):
    """'awmin:awmax:naw,ammin:ammax:nam' -> (aw values, am values)."""
    try:
        parts = [p.split(":") for p in spec.split(",")]
        (a0, a1, na), (m0, m1, nm) = parts
        axes = [(float(a0), float(a1), int(na)), (float(m0), float(m1), int(nm))]
    except ValueError as exc:
        raise ValueError(f"grid must look like 'awmin:awmax:naw,ammin:ammax:nam', got {spec!r}") from exc
    out = []
    for lo, hi, n in axes:
        if not (math.isfinite(lo) and math.isfinite(hi)) or n < 1:
            raise ValueError(f"grid bounds must be finite with at least one point, got {spec!r}")
        out.append(list(np.linspace(lo, hi, n)) if n > 1 else [lo])
    return out[0], out[1]


def exact_on_family(kappa: float, am: float, aw: float, n: int):
    """Closed-form eigenvalue when am = +-aw, else None."""
    tol = 1e-12 * (1 + abs(am) + abs(aw))
    try:
        if abs(am - aw) <= tol:
            return exact_eigenvalue_equal_coupling(kappa, am, 1, n)
        if abs(am + aw) <= tol:
            return exact_eigenvalue_equal_coupling(kappa, am, -1, n)
    except NegativeDiscriminant:
        return None
    return None


SWEEP_FIELDS = ("kind", "lower", "upper", "center", "height", "z_re", "z_im",
                "residual_certificate", "apriori_label", "exact", "contains_exact", "error")
SWEEP_TAGS = (("p1", 1), ("m1", -1))
SWEEP_COLUMNS = ("kappa", "h", "aw", "am") + tuple(
    f"{f}_{tag}" for tag, _ in SWEEP_TAGS for f in SWEEP_FIELDS)


def _sweep_task(args):
    kappa, h, aw, am, nevp, rtol = args
    row = {"kappa": fmt(kappa), "h": fmt(h), "aw": fmt(aw), "am": fmt(am)}
    try:
        session = Session(OperatorParams(kappa, am, aw), h, nevp=nevp, rtol=rtol)
        recs = [enclose_one(session, f"n={n}") for _, n in SWEEP_TAGS]
    except (KNDiracError, ValueError) as exc:
        recs = [RunRecord(OperatorParams(kappa, am, aw), h, f"n={n}",
                          error=f"{type(exc).__name__}: {exc}") for _, n in SWEEP_TAGS]
    for (tag, n), rec in zip(SWEEP_TAGS, recs):
        r = rec.to_row()
        exact = exact_on_family(kappa, am, aw, n)
        inside = rec.enclosure.contains(exact) if (rec.enclosure and exact is not None) else None
        vals = {f: r.get(f, "") for f in SWEEP_FIELDS}
        vals["exact"], vals["contains_exact"] = fmt(exact), fmt(inside)
        for f in SWEEP_FIELDS:
            row[f"{f}_{tag}"] = vals[f]
    return row


def sweep(kappa: float, aw_values, am_values, h: float = 0.1, nevp=6, rtol=1e-12, jobs=1):
    """Rows for lambda_1 and lambda_-1 over the (aw, am) grid, aw varying slowest."""
    validate_params(OperatorParams(kappa))
    tasks = [(kappa, h, aw, am, nevp, rtol) for aw in aw_values for am in am_values]
    return _map(_sweep_task, tasks, jobs)


# -- self check ------------------------------------------------------------------

ORACLE_CASES = ((0.5, 0.0, 0.0), (1.5, 0.25, 0.75), (-4.5, 0.005, 0.015))
ORACLE_NS = (4, 8, 16)
ORACLE_RTOL = 1e-8


def relative_deviation(A, B) -> float:
    """max |A - B| / max(|B|, 1e-3 max|B|) entrywise over the union of patterns."""
    A = np.asarray(A.todense() if hasattr(A, "todense") else A)
    B = np.asarray(B.todense() if hasattr(B, "todense") else B)
    scale = np.max(np.abs(B))
    if scale == 0:
        return float(np.max(np.abs(A)))
    den = np.maximum(np.abs(B), 1e-3 * scale)
    return float(np.max(np.abs(A - B) / den))


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


def _check(name, fn) -> Check:
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed invariant, reported like one
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(name, bool(ok), detail)


def verify(quad: QuadratureSpec | None = None):
    """Run the invariant suite; returns a list of Check."""
    quad = quad or QuadratureSpec()
    checks = []

    for kappa, am, aw in ORACLE_CASES:
        for n in ORACLE_NS:
            def oracle(kappa=kappa, am=am, aw=aw, n=n):
                p, mesh = OperatorParams(kappa, am, aw), build_mesh(n)
                fast = assemble_pencil(p, mesh, quad)
                ref = assemble_pencil_oracle(p, mesh)
                dev = max(relative_deviation(getattr(fast, m), getattr(ref, m)) for m in "QRS")
                return dev <= ORACLE_RTOL, f"max relative deviation {dev:.2e}"
            checks.append(_check(f"oracle_equivalence kappa={kappa:g} am={am:g} aw={aw:g} n={n}",
                                 oracle))

    def hermitian():
        worst = 0.0
        for kappa, am, aw in ORACLE_CASES:
            pen = assemble_pencil(OperatorParams(kappa, am, aw), build_mesh(32), quad)
            for M in (pen.Q, pen.R, pen.S):
                worst = max(worst, float(abs(M - M.conj().T).max()))
        return worst == 0.0, f"max |M - M^H| = {worst:.1e}"
    checks.append(_check("hermiticity", hermitian))

    def mass_pd():
        lo = math.inf
        for n in (4, 16, 64):
            mesh = build_mesh(n)
            pen = assemble_pencil(OperatorParams(1.5, 0.25, 0.25), mesh, quad)
            lo = min(lo, float(np.linalg.eigvalsh(pen.S.toarray())[0]) / mesh.h)
        return lo > 0.1, f"min eig(S)/h = {lo:.4f}"
    checks.append(_check("mass_positive_definite", mass_pd))

    def conj_closed():
        pen = assemble_pencil(OperatorParams(1.5, 0.25, 0.75), build_mesh(64), quad)
        pts = solve_spec2(pen, SolverConfig("full")).points
        worst = max(float(np.min(np.abs(pts - np.conj(z)))) / tau_sym(z) for z in pts)
        extract_pairs(pts)
        return worst <= 1.0, f"max conjugate gap / tau_sym = {worst:.2e}"
    checks.append(_check("conjugate_closure", conj_closed))

    def scalar():
        dev = 0.0
        for q, r, s, expected in ((5.0, 2.0, 1.0, (2 - 1j, 2 + 1j)), (1.0, 0.0, 1.0, (-1j, 1j))):
            pen = PencilMatrices.from_arrays([[q]], [[r]], [[s]])
            pts = solve_spec2(pen, SolverConfig("full")).points
            if len(pts) != len(expected):
                return False, f"expected {len(expected)} points, got {len(pts)}"
            dev = max(dev, max(float(np.min(np.abs(pts - e))) for e in expected))
        return dev <= 1e-12, f"max deviation {dev:.1e}"
    checks.append(_check("scalar_linearization", scalar))

    for kappa in (1.5, 2.5):
        for n in (64, 128, 256):
            def contain(kappa=kappa, n=n):
                p = OperatorParams(kappa, 0.25, 0.25)
                pen = assemble_pencil(p, build_mesh(n), quad)
                parts = []
                ok = True
                for idx in (1, -1):
                    exact = exact_eigenvalue_equal_coupling(kappa, 0.25, 1, idx)
                    spec = solve_spec2(pen, SolverConfig("shifted", shift=exact))
                    enc = basic_enclosure(nearest_pair(extract_pairs(spec), exact))
                    ok = ok and enc.contains(exact)
                    parts.append(f"n={idx}: half-width {enc.width / 2:.3e}")
                return ok, ", ".join(parts)
            checks.append(_check(f"containment kappa={kappa:g} n={n}", contain))

    def pollution():
        pen = assemble_pencil(OperatorParams(1.5, 0.25, 0.25), build_mesh(64), quad)
        pts = solve_spec2(pen, SolverConfig("full")).points
        bad = [z for z in pts if disk_contains(2.30, 3.10, z)]
        return not bad, f"{len(bad)} points in the disk over (2.30, 3.10)"
    checks.append(_check("no_pollution_in_gap", pollution))

    return checks


def format_report(checks) -> str:
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}" for c in checks]
    n_ok = sum(c.passed for c in checks)
    lines.append(f"verify: {n_ok}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n"


__all__ = [
    "RunRecord", "SlopeEstimate", "Session", "enclose_one", "run_enclosures", "convergence",
    "sweep", "verify", "format_report", "write_records", "read_records", "write_table",
    "read_table", "parse_grid", "parse_targets", "kappa_grid", "exact_on_family",
]
