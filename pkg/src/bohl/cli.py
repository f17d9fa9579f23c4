"""``bohl`` command line: run a pipeline on a potential spec and report every check.

Usage::

    bohl discrete reconstruct --spec v.json [--tolerance T] [--dump out.txt] [--json]
    bohl discrete verify      --spec v.json
    bohl discrete agmon       --spec v.json
    bohl continuum analyze    --spec v.json
    bohl continuum classify   --spec v.json
    bohl continuum darboux    --spec v.json

Exit status: 0 when every check passes, 1 when any check fails, 2 on
invalid input or an unmet hypothesis.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import continuum as cont
from . import lattice as lat
from . import oracles
from .errors import BohlError, ConsistencyError, InvalidInputError

KINDS = ("constant", "affine", "power", "samples")
COMMANDS = {
    "discrete": ("reconstruct", "verify", "agmon"),
    "continuum": ("analyze", "classify", "darboux"),
}


class SpecError(InvalidInputError):
    """Spec document is malformed; the message starts with the offending field path."""


# ---------------------------------------------------------------------------
# spec parsing
# ---------------------------------------------------------------------------


@dataclass
class PotentialSpec:
    kind: str
    params: dict
    window: tuple | None = None
    interval: tuple | None = None
    h: float | None = None
    options: dict = field(default_factory=dict)

    @property
    def is_lattice(self) -> bool:
        return self.window is not None

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        d.update({k: v for k, v in self.params.items() if k != "values"})
        if "values" in self.params:
            d["values"] = [_num(v) for v in self.params["values"]]
        if self.window is not None:
            d["window"] = list(self.window)
        else:
            d["interval"] = list(self.interval)
            d["h"] = self.h
        d.update(self.options)
        return d


def _number(doc, key, path, integer=False):
    if key not in doc:
        raise SpecError(f"{path}.{key}: missing field")
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecError(f"{path}.{key}: expected a number, got {v!r}")
    if integer and int(v) != v:
        raise SpecError(f"{path}.{key}: expected an integer, got {v!r}")
    if not math.isfinite(v):
        raise SpecError(f"{path}.{key}: must be finite")
    return int(v) if integer else float(v)


def _pair(doc, key, path, integer=False):
    v = doc[key]
    if not isinstance(v, list) or len(v) != 2:
        raise SpecError(f"{path}.{key}: expected a two-element list")
    return tuple(_number({i: x for i, x in enumerate(v)}, i, f"{path}.{key}", integer) for i in range(2))


def _complex(doc, key, path):
    v = doc[key]
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2:
        re, im = (_number({i: x for i, x in enumerate(v)}, i, f"{path}.{key}") for i in range(2))
        return complex(re, im)
    raise SpecError(f"{path}.{key}: expected a number or [re, im]")


def parse_spec(text: str, base_dir: str | Path | None = None) -> PotentialSpec:
    """Validate a JSON potential spec.

    Required: ``kind`` plus its parameters (``value``; ``slope``/``intercept``;
    ``scale``/``exponent``; ``values`` or ``file``) and exactly one domain,
    either ``window: [n_lo, n_hi]`` or ``interval: [a, b]`` with optional
    ``h``. Optional keys: ``C``, ``anchor``, ``x0``, ``tail_start``,
    ``initial: {"u": [re, im], "du": [re, im]}`` and
    ``bump: {"center": c, "width": w}``.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec: not valid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(doc, dict):
        raise SpecError("spec: top level must be an object")
    path = "spec"
    kind = doc.get("kind")
    if kind not in KINDS:
        raise SpecError(f"{path}.kind: unknown kind {kind!r}; expected one of {', '.join(KINDS)}")

    params = {}
    if kind == "constant":
        params["value"] = _number(doc, "value", path)
    elif kind == "affine":
        params["slope"] = _number(doc, "slope", path)
        params["intercept"] = _number(doc, "intercept", path) if "intercept" in doc else 0.0
    elif kind == "power":
        params["scale"] = _number(doc, "scale", path)
        params["exponent"] = _number(doc, "exponent", path)
    else:
        if "values" in doc:
            raw = doc["values"]
            if not isinstance(raw, list):
                raise SpecError(f"{path}.values: expected a list of numbers")
            vals = [_number({i: x for i, x in enumerate(raw)}, i, f"{path}.values") for i in range(len(raw))]
        elif "file" in doc:
            fp = Path(doc["file"])
            if base_dir is not None and not fp.is_absolute():
                fp = Path(base_dir) / fp
            try:
                vals = np.loadtxt(fp, ndmin=1).astype(float).tolist()
            except (OSError, ValueError) as exc:
                raise SpecError(f"{path}.file: cannot read samples from {fp} ({exc})") from None
        else:
            raise SpecError(f"{path}.values: missing field (or give 'file')")
        params["values"] = vals

    has_window, has_interval = "window" in doc, "interval" in doc
    if has_window == has_interval:
        raise SpecError(f"{path}: give exactly one of 'window' (lattice) or 'interval' (continuum)")
    spec = PotentialSpec(kind, params)
    if has_window:
        lo, hi = _pair(doc, "window", path, integer=True)
        if hi < lo + 2:
            raise SpecError(f"{path}.window: need n_hi >= n_lo + 2, got [{lo}, {hi}]")
        spec.window = (lo, hi)
        if kind == "samples" and len(params["values"]) != hi - lo + 1:
            raise SpecError(
                f"{path}.values: length {len(params['values'])} does not match window of {hi - lo + 1} points"
            )
    else:
        a, b = _pair(doc, "interval", path)
        if not b > a:
            raise SpecError(f"{path}.interval: need a < b")
        spec.interval = (a, b)
        spec.h = _number(doc, "h", path) if "h" in doc else cont.DEFAULT_STEP
        if not spec.h > 0:
            raise SpecError(f"{path}.h: must be positive")
        if kind == "samples" and len(params["values"]) < 2:
            raise SpecError(f"{path}.values: need at least 2 samples")

    for key in ("C", "x0", "tail_start"):
        if key in doc:
            spec.options[key] = _number(doc, key, path)
    if "anchor" in doc:
        spec.options["anchor"] = _number(doc, "anchor", path, integer=True)
    if "initial" in doc:
        init = doc["initial"]
        if not isinstance(init, dict) or "u" not in init or "du" not in init:
            raise SpecError(f"{path}.initial: expected an object with 'u' and 'du'")
        u0, du0 = _complex(init, "u", f"{path}.initial"), _complex(init, "du", f"{path}.initial")
        spec.options["initial"] = {"u": [u0.real, u0.imag], "du": [du0.real, du0.imag]}
    if "bump" in doc:
        bump = doc["bump"]
        if not isinstance(bump, dict):
            raise SpecError(f"{path}.bump: expected an object")
        spec.options["bump"] = {
            "center": _number(bump, "center", f"{path}.bump"),
            "width": _number(bump, "width", f"{path}.bump"),
        }
    return spec


def lattice_potential(spec: PotentialSpec) -> lat.LatticePotential:
    lo, hi = spec.window
    n = np.arange(lo, hi + 1, dtype=float)
    p = spec.params
    if spec.kind == "constant":
        v = np.full(n.size, p["value"])
    elif spec.kind == "affine":
        v = p["slope"] * n + p["intercept"]
    elif spec.kind == "power":
        if p["exponent"] < 0 and lo <= 0 <= hi:
            raise InvalidInputError("negative exponent with n = 0 in the window")
        v = p["scale"] * n ** p["exponent"]
    else:
        v = np.asarray(p["values"], dtype=float)
    return lat.LatticePotential(lat.LatticeWindow(lo, hi), v)


def continuum_potential(spec: PotentialSpec):
    a, b = spec.interval
    grid = cont.Grid.from_step(a, b, spec.h)
    p = spec.params
    if spec.kind == "constant":
        V = cont.ContinuumPotential.constant(p["value"])
    elif spec.kind == "affine":
        V = cont.ContinuumPotential.affine(p["slope"], p["intercept"])
    elif spec.kind == "power":
        if p["exponent"] < 0 and a <= 0 <= b:
            raise InvalidInputError("negative exponent with x = 0 in the interval")
        V = cont.ContinuumPotential.power(p["scale"], p["exponent"])
    else:
        V = cont.ContinuumPotential.samples(np.linspace(a, b, len(p["values"])), p["values"])
    return V, grid


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def _num(x):
    """Round to 9 significant digits; non-finite values become strings."""
    if isinstance(x, (complex, np.complexfloating)):
        x = complex(x)
        if x.imag == 0:
            return _num(x.real)
        return [_num(x.real), _num(x.imag)]
    x = float(x)
    if not math.isfinite(x):
        return str(x)
    return float(f"{x:.9g}")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, complex, np.floating, np.complexfloating)):
        return _num(obj)
    return obj


@dataclass
class Check:
    name: str
    passed: bool
    residual: float
    tolerance: float

    def to_dict(self):
        return {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "residual": _num(self.residual),
            "tolerance": _num(self.tolerance),
        }


@dataclass
class Report:
    command: str
    spec: dict
    checks: list = field(default_factory=list)
    derived: dict = field(default_factory=dict)
    error: str | None = None
    timing: float | None = None

    def check(self, name, residual, tolerance):
        residual = float(np.real(residual))
        self.checks.append(Check(name, bool(residual <= tolerance), residual, tolerance))

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    def to_dict(self):
        d = {
            "command": self.command,
            "spec": _clean(self.spec),
            "status": "pass" if self.passed else "fail",
            "checks": [c.to_dict() for c in self.checks],
            "derived": _clean(self.derived),
        }
        if self.error is not None:
            d["error"] = self.error
        if self.timing is not None:
            d["timing_s"] = round(self.timing, 3)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = [f"bohl {self.command}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            lines.append(
                f"  {'pass' if c.passed else 'FAIL'}  {c.name:<32} residual={_fmt(c.residual)}  tol={_fmt(c.tolerance)}"
            )
        for k, v in _clean(self.derived).items():
            lines.append(f"  {k} = {v}")
        if self.error:
            lines.append(f"  error: {self.error}")
        return "\n".join(lines)


def _fmt(x):
    return f"{x:.9g}"


def _write_columns(path, header, columns):
    with open(path, "w") as fh:
        fh.write("# " + " ".join(header) + "\n")
        for row in zip(*columns):
            fh.write(" ".join(_fmt(float(v)) for v in row) + "\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _discrete_reconstruct(spec, report, tol, dump):
    V = lattice_potential(spec)
    w = V.window
    psi_plus, psi_minus = lat.positive_basis(V)
    G = lat.build_green_matrix(psi_minus, psi_plus)
    z = lat.diagonal_sequence(G)
    anchor = spec.options.get("anchor", w.n_lo + w.size // 2)
    basis = lat.bohl_reconstruct(z, anchor)
    V_rec = lat.potential_from_diagonal(z)

    report.check("wronskian_unit", abs(lat.wronskian_discrete(psi_minus, psi_plus) - 1.0), lat.RECURRENCE_TOL)
    prod = basis.plus.values * basis.minus.values
    report.check("product_equals_z2", np.max(np.abs(prod - z.z**2) / z.z**2), lat.ALGEBRAIC_TOL)
    report.check("phi_plus_recurrence", oracles.recurrence_residual(V, basis.plus), 1e-9)
    report.check("phi_minus_recurrence", oracles.recurrence_residual(V, basis.minus), 1e-9)

    # G_nm against z_n z_m prod 1/S, relative, over m < n
    S = basis.s.values
    logS = np.concatenate(([0.0], np.cumsum(np.log(S))))
    m_idx, n_idx = np.triu_indices(w.size, k=1)
    ident = z.z[n_idx] * z.z[m_idx] * np.exp(-(logS[n_idx] - logS[m_idx]))
    g_nm = G.entries[n_idx, m_idx]
    report.check("green_product_identity", np.max(np.abs(ident - g_nm) / np.abs(g_nm)), 1e-9)
    G_or = oracles.green_by_inversion(V)
    report.check("oracle_inversion", np.max(np.abs(G_or.entries - G.entries)[1:-1, 1:-1]), lat.ROUNDTRIP_TOL)
    err = float(np.max(np.abs(V_rec.values - V.values[1:-1])))
    report.check("potential_roundtrip", err, tol or lat.ROUNDTRIP_TOL)
    report.derived.update(
        window=[w.n_lo, w.n_hi],
        anchor=anchor,
        min_potential=float(np.min(V.values)),
        max_roundtrip_error=err,
        min_green_diagonal=float(np.min(z.z**2)),
    )
    if dump:
        s_col = np.concatenate(([np.nan], S))
        v_col = np.concatenate(([np.nan], V_rec.values, [np.nan]))
        _write_columns(
            dump,
            ["n", "V", "G_nn", "z", "S", "phi_plus", "phi_minus", "V_from_z"],
            [w.indices, V.values, z.z**2, z.z, s_col, basis.plus.values, basis.minus.values, v_col],
        )


def _require_positive(V):
    vmin = float(np.min(V.values))
    if vmin <= 0:
        raise lat.HypothesisError(
            f"min V_n = {vmin:g} <= 0: the positive-branch checks need V_n > 0 on the window"
        )
    return vmin


def _discrete_verify(spec, report, tol, dump):
    V = lattice_potential(spec)
    vmin = _require_positive(V)
    C = spec.options.get("C", 0.5 * vmin)
    G = lat.positive_green_matrix(V)
    z = lat.diagonal_sequence(G)
    r = lat.gtov_residual(G, V)
    report.check("gtov_residual", np.max(np.abs(r)), tol or lat.ROUNDTRIP_TOL)

    rep = lat.agmon_bound_report(V, G, C)
    g_fail = sum(not c.g_ok for c in rep.checks)
    s_fail = sum(not c.s_ok for c in rep.checks)
    report.check("green_diagonal_bounds_failures", g_fail, 0)
    report.check("s_factor_bounds_failures", s_fail, 0)

    Q = lat.darboux_discrete_q(z)
    phi = lat.bohl_reconstruct(z, V.window.n_lo + V.window.size // 2).plus.values
    first = np.abs(phi[1:] - phi[:-1] + Q * phi[:-1]) / np.abs(phi[1:])
    report.check("first_order_annihilation", np.max(first), lat.RECURRENCE_TOL)

    worst = 0.0
    eye = np.eye(V.window.size)
    for k in range(V.window.size):
        diff = lat.darboux_discrete_apply(z, eye[k]) - oracles.apply_operator(V, eye[k])
        worst = max(worst, float(np.max(np.abs(diff))))
    report.check("darboux_unit_sequences", worst, 1e-9)
    report.derived.update(C=C, K_A=rep.K_A, min_potential=vmin)
    if dump:
        _write_columns(dump, ["n", "V", "G_nn", "gtov_residual"],
                       [V.window.indices[1:-1], V.values[1:-1], G.diagonal[1:-1], r])


def _discrete_agmon(spec, report, tol, dump):
    V = lattice_potential(spec)
    vmin = _require_positive(V)
    C = spec.options.get("C", 0.5 * vmin)
    K = lat.agmon_constant(C)
    w = V.window
    report.check("K_A_below_simplified_constant", max(0.0, K - math.sqrt(1.0 + 4.0 / C**2)), 0.0)

    d_a = lat.agmon_distance(V, w.n_lo, w.n_hi, "a", C)
    d_b = lat.agmon_distance(V, w.n_lo, w.n_hi, "b")
    G = lat.positive_green_matrix(V)
    rep = lat.agmon_bound_report(V, G, C)
    z = lat.diagonal_sequence(G)
    logS = np.concatenate(([0.0], np.cumsum(np.log(lat.s_factor(z).values))))
    # Sum ln S is the exact decay exponent of phi_minus / z; variant a must not exceed it
    excess = float(np.max(rep.distances["a"] - logS))
    report.check("distance_a_below_decay_exponent", excess, tol or 1e-12)
    report.derived.update(
        C=C,
        K_A=K,
        simplified_constant=math.sqrt(1.0 + 4.0 / C**2),
        distance_a=d_a,
        distance_b=d_b,
        decay_exponent=float(logS[-1]),
        distance_b_minus_decay=float(d_b - logS[-1]),
    )
    if dump:
        _write_columns(dump, ["n", "V", "d_a", "d_b", "sum_ln_S"],
                       [w.indices, V.values, rep.distances["a"], rep.distances["b"], logS])


def _continuum_diagonal(spec):
    V, grid = continuum_potential(spec)
    init = spec.options.get("initial")
    if init is not None:
        u = cont.integrate_sle(V, grid, complex(*init["u"]), complex(*init["du"]))
        return V, grid, cont.special_diagonal(u), cont.special_alpha(u)
    if np.min(V(grid.x)) > 0:
        return V, grid, cont.diagonal_for_potential(V, grid), None
    u = cont.conjugate_seed(V, grid)
    return V, grid, cont.special_diagonal(u), cont.special_alpha(u)
    return V, grid, Z, sa


def _continuum_analyze(spec, report, tol, dump):
    V, grid, Z, sa = _continuum_diagonal(spec)
    h = grid.h
    report.check("diagonal_equation_residual", Z.j_max, tol or 1e-5)
    x0 = spec.options.get("x0", 0.5 * (grid.a + grid.b))
    B = cont.bohl_basis(Z, x0)
    stencil_tol = max(1e-5, 10.0 * h**2)
    report.check("bohl_plus_sle_residual", B.residual_plus, stencil_tol)
    report.check("bohl_minus_sle_residual", B.residual_minus, stencil_tol)
    report.check("bohl_wronskian_unit", abs(cont.wronskian_grid(B.minus, B.plus, rtol=1e-6) - 1.0), 1e-6)
    xs = grid.x
    report.check("green_diagonal_equals_Z2", np.max(np.abs(cont.green_function(Z, xs, xs) - Z.Z**2)), 1e-12)
    j = grid.N // 2
    g_xy = cont.green_function(Z, xs[j // 2], xs[j])
    g_yx = cont.green_function(Z, xs[j], xs[j // 2])
    report.check("green_symmetry", abs(g_xy - g_yx), 0.0)
    jump = cont.green_derivative_jump(Z, xs[j])
    report.check("green_derivative_jump", abs(jump + 1.0), 5 * h)
    report.derived.update(
        grid_points=grid.N,
        h=h,
        diagonal_real=bool(np.all(np.abs(Z.Z2.imag) <= 1e-10 * np.abs(Z.Z2))),
        min_abs_Z=float(np.min(np.abs(Z.Z))),
        derivative_jump=jump,
        bohl_anchor=x0,
    )
    if sa is not None:
        report.derived.update(alpha=sa.alpha, arg_alpha_over_pi_4=sa.k)
    if dump:
        _write_columns(dump, ["x", "re_Z", "im_Z", "abs_J"], [xs, Z.Z.real, Z.Z.imag, np.abs(Z.J)])


def _continuum_classify(spec, report, tol, dump):
    V, grid, Z, sa = _continuum_diagonal(spec)
    res = cont.oscillation_classify(Z, spec.options.get("tail_start"))
    report.check("classification_determinate", 0.0 if res.kind != "indeterminate" else 1.0, 0.0)
    report.derived.update(
        classification=res.kind,
        total_phase=res.total_phase,
        tail_increments=list(res.increments),
        tail_ratios=list(res.ratios),
    )
    if sa is not None:
        report.derived.update(alpha=sa.alpha, arg_alpha_over_pi_4=sa.k)
    if dump:
        xs = grid.x
        phase = Z.exponent()
        _write_columns(dump, ["x", "abs_Z", "phase"], [xs, np.abs(Z.Z), phase])


def _continuum_darboux(spec, report, tol, dump):
    V, grid, Z, _ = _continuum_diagonal(spec)
    bump = spec.options.get("bump", {
        "center": 0.5 * (grid.a + grid.b),
        "width": 0.45 * (grid.b - grid.a),
    })
    f = cont.bump(grid, bump["center"], bump["width"])
    res = cont.darboux_factorization_residual(Z, f)
    report.check("diagonal_equation_residual", Z.j_max, 1e-5)
    report.check("darboux_factorization_residual", res, tol or 1e-3)
    report.derived.update(bump_center=bump["center"], bump_width=bump["width"])
    if dump:
        _write_columns(dump, ["x", "f"], [grid.x, f])


_HANDLERS = {
    ("discrete", "reconstruct"): _discrete_reconstruct,
    ("discrete", "verify"): _discrete_verify,
    ("discrete", "agmon"): _discrete_agmon,
    ("continuum", "analyze"): _continuum_analyze,
    ("continuum", "classify"): _continuum_classify,
    ("continuum", "darboux"): _continuum_darboux,
}


def run_command(command, spec: PotentialSpec, tolerance=None, dump=None, timing=False):
    """Run one ``(group, subcommand)`` on a parsed spec; returns ``(Report, exit_code)``."""
    group, sub = command
    report = Report(f"{group} {sub}", spec.to_dict())
    if (group, sub) not in _HANDLERS:
        report.error = f"unknown command {group} {sub}"
        return report, 2
    if (group == "discrete") != spec.is_lattice:
        report.error = (
            "discrete commands need a 'window' spec" if group == "discrete"
            else "continuum commands need an 'interval' spec"
        )
        return report, 2
    t0 = time.perf_counter()
    try:
        _HANDLERS[(group, sub)](spec, report, tolerance, dump)
    except ConsistencyError as exc:
        report.error = f"consistency failure: {exc}"
        return report, 1
    except BohlError as exc:
        report.error = f"{type(exc).__name__}: {exc}"
        return report, 2
    if timing:
        report.timing = time.perf_counter() - t0
    return report, 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bohl", description="Bohl transformation verification suite")
    groups = parser.add_subparsers(dest="group", required=True)
    for group, subs in COMMANDS.items():
        gp = groups.add_parser(group)
        sp = gp.add_subparsers(dest="sub", required=True)
        for sub in subs:
            p = sp.add_parser(sub)
            p.add_argument("--spec", required=True, help="JSON potential spec file")
            p.add_argument("--tolerance", type=float, default=None,
                           help="override the headline tolerance of the command")
            p.add_argument("--dump", default=None, help="write sequences as text columns to this path")
            p.add_argument("--json", action="store_true", help="emit the JSON report")
            p.add_argument("--timing", action="store_true", help="include wall time (breaks byte-for-byte determinism)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        path = Path(args.spec)
        spec = parse_spec(path.read_text(), base_dir=path.parent)
    except OSError as exc:
        print(f"bohl: cannot read spec: {exc}", file=sys.stderr)
        return 2
    except SpecError as exc:
        print(f"bohl: {exc}", file=sys.stderr)
        return 2
    report, code = run_command((args.group, args.sub), spec, args.tolerance, args.dump, args.timing)
    print(report.to_json() if args.json else report.to_text())
    if report.error:
        print(f"bohl: {report.error}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
