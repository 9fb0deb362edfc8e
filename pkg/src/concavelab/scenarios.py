"""Scenario catalog and verification pipeline.

Each scenario bundles a problem, a transform (alpha, beta), an audit
mode, and the checks it must satisfy: exact-concavity verdicts against
the discretization tolerance, quantitative defect bounds driven by the
weight, quasiconcavity of snapshots, plus solver diagnostics (monotone
flag, boundary barrier, Hopf quotients).  run_property_suite runs the
randomized inequality checks for the concavity-function algebra.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from .audit import (DefectReport, SamplerConfig, min_defect,
                    power_transform, quasiconcavity_defect,
                    tau_audit_value, FieldEvaluator, harmonic_combination)
from .bounds import (BoundParams, BoundReport, alpha_exponent,
                     log_concavity_rhs, quantitative_rhs,
                     boundary_lower_bound, spacetime_alpha_window)
from .domains import (build_discretization, disk, distance_to_boundary,
                      inner_region_mask, unit_square)
from .errors import RangeViolation, ValidityViolation
from .operators import Field, principal_eigenpair
from .parabolic import make_time_grid, solve_trajectory
from .problems import (Problem, SourceTerm, Weight, check_hypotheses,
                       sup_slope_lambda, weight_concavity_defect)
from .stationary import solve_stationary


@dataclass(frozen=True)
class AuditSpec:
    """One transform + audit + checks within a scenario.

    checks entries:
      ("exact",)                    defect >= -tau_audit
      ("quantitative", mode)       defect >= rhs(mode) - tau_audit
      ("log_bound", variant)       defect >= log rhs(variant) - tau_audit
      ("quasiconcave",)            superlevel sets of snapshots convex
    """
    alpha: float
    beta: float = 1.0
    mode: str = "spacetime"
    include_infinity: bool = True
    checks: tuple = (("exact",),)


@dataclass(frozen=True)
class Scenario:
    id: str
    description: str
    domain: str            # square | disk
    weight: Weight
    source: SourceTerm
    u0: str = "zero"       # zero | eigenfunction
    u0_scale: float = 1.0
    horizon: float = 2.0
    truncate: bool = False
    theta: float = math.inf
    audits: tuple = ()
    needs_strong_convexity: bool = False
    check_boundary_barrier: bool = False
    check_hopf: bool = True


@dataclass
class VerificationReport:
    scenario_id: str
    verdict: str           # pass | fail | not_applicable
    assertions: list = dc_field(default_factory=list)
    defect_reports: list = dc_field(default_factory=list)
    bound_reports: list = dc_field(default_factory=list)
    diagnostics: dict = dc_field(default_factory=dict)
    runtime: float = 0.0

    def add_assertion(self, name, passed, measured, bound):
        self.assertions.append(
            {"name": name, "passed": bool(passed),
             "measured": float(measured), "bound": float(bound),
             "margin": float(measured - bound)})

    def to_json(self) -> str:
        payload = {
            "scenario": self.scenario_id,
            "verdict": self.verdict,
            "assertions": self.assertions,
            "defects": [json.loads(r.to_json())
                        for r in self.defect_reports],
            "bounds": [json.loads(r.to_json()) for r in self.bound_reports],
            "diagnostics": self.diagnostics,
        }
        return json.dumps(payload, sort_keys=True)


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def _catalog() -> dict:
    scns = []

    def add(s):
        scns.append(s)

    for domain in ("square", "disk"):
        add(Scenario(
            id=f"torsion-{domain}", domain=domain,
            description="constant-source problem; sqrt of the rescaled "
                        "solution is concave in space-time",
            weight=Weight("constant", c=1.0), source=SourceTerm("one"),
            audits=(AuditSpec(alpha=0.5, beta=2.0, mode="spacetime",
                              checks=(("exact",),)),),
            check_boundary_barrier=True))
        add(Scenario(
            id=f"lane-emden-{domain}", domain=domain,
            description="sublinear power source u^(1/2); u^(1/4) concave "
                        "in space-time",
            weight=Weight("constant", c=1.0),
            source=SourceTerm("power_q", q=0.5),
            audits=(AuditSpec(alpha=0.25, beta=1.0, mode="spacetime",
                              checks=(("exact",),)),),
            check_boundary_barrier=True))

    add(Scenario(
        id="sum-powers-square", domain="square",
        description="source a u^p + u^q with p=0.5, q=0.6; u^((1-q)/2) "
                    "concave in rescaled space-time",
        weight=Weight("constant", c=1.0),
        source=SourceTerm("power_sum", q=0.6, p=0.5),
        audits=(AuditSpec(alpha=0.2, beta=2.0, mode="spacetime",
                          checks=(("exact",),)),)))

    add(Scenario(
        id="dist-weight-torsion-disk", domain="disk",
        description="torsion with the concave weight d(x); u^(1/3) "
                    "concave in rescaled space-time",
        weight=Weight("distance_power", c=1.0, omega=1.0, theta=1.0),
        source=SourceTerm("one"),
        audits=(AuditSpec(alpha=1.0 / 3.0, beta=2.0, mode="spacetime",
                          checks=(("exact",),)),)))

    add(Scenario(
        id="eigen-square", domain="square",
        description="linear source a u with constant a; log u concave "
                    "at every time",
        weight=Weight("constant", c=1.0), source=SourceTerm("identity"),
        u0="eigenfunction", needs_strong_convexity=True,
        audits=(AuditSpec(alpha=0.0, beta=1.0, mode="space",
                          include_infinity=False,
                          checks=(("exact",), ("log_bound", "eigen"))),)))

    add(Scenario(
        id="saturable-square", domain="square",
        description="saturable source s^2/(1+s) with constant a; log u "
                    "concave at every time",
        weight=Weight("constant", c=1.0), source=SourceTerm("saturable"),
        u0="eigenfunction", needs_strong_convexity=True,
        audits=(AuditSpec(alpha=0.0, beta=1.0, mode="space",
                          include_infinity=False,
                          checks=(("exact",), ("log_bound", "general"))),)))

    add(Scenario(
        id="logistic-square", domain="square",
        description="logistic source a(x) u - u^2 with concave a = d(x); "
                    "log u concave at every time",
        weight=Weight("distance_power", c=1.0, omega=1.0, theta=1.0),
        source=SourceTerm("logistic"),
        u0="eigenfunction", u0_scale=0.5, needs_strong_convexity=True,
        audits=(AuditSpec(alpha=0.0, beta=1.0, mode="space",
                          include_infinity=False,
                          checks=(("exact",),)),)))

    add(Scenario(
        id="log-square", domain="square",
        description="logarithmic source s log s with constant a; log u "
                    "concave at every time on the finite horizon",
        weight=Weight("constant", c=1.0), source=SourceTerm("log_s"),
        u0="eigenfunction", u0_scale=0.5, horizon=1.0,
        needs_strong_convexity=True,
        audits=(AuditSpec(alpha=0.0, beta=1.0, mode="space",
                          include_infinity=False,
                          checks=(("exact",),
                                  ("log_bound", "product_cases"))),)))

    add(Scenario(
        id="eigen-dist-square", domain="square",
        description="linear source with the concave weight "
                    "sqrt(t) sqrt(d(x)); log u concave at every time",
        weight=Weight("distance_power", c=1.0, gamma=0.5, omega=0.5,
                      theta=1.0),
        source=SourceTerm("identity"),
        u0="eigenfunction", needs_strong_convexity=True, truncate=True,
        audits=(AuditSpec(alpha=0.0, beta=1.0, mode="space",
                          include_infinity=False,
                          checks=(("exact",),)),)))

    add(Scenario(
        id="kennington-square", domain="square",
        description="source (1-u)^p from zero data; snapshots are "
                    "quasiconcave (convex superlevel sets)",
        weight=Weight("constant", c=1.0),
        source=SourceTerm("one_minus_s_p", p=0.5),
        audits=(AuditSpec(alpha=1.0, beta=1.0, mode="space",
                          include_infinity=False,
                          checks=(("quasiconcave",),)),)))

    for eps in (0.05, 0.1, 0.2):
        tag = str(eps).replace("0.", "")
        add(Scenario(
            id=f"ramp-le-eps{tag}", domain="square",
            description=f"sublinear source with a rippled weight "
                        f"(eps={eps}); quantitative defect bounds",
            weight=Weight("ramp_bump_perturbed", eps=eps, theta=1.0),
            source=SourceTerm("power_q", q=0.5),
            theta=1.0,
            audits=(
                AuditSpec(alpha=0.25, beta=1.0, mode="spacetime",
                          checks=(("quantitative", "oscillation"),
                                  ("quantitative", "rough"),
                                  ("quantitative", "prop413"))),
                AuditSpec(alpha=1.0 / 6.0, beta=1.0, mode="spacetime",
                          checks=(("quantitative", "theta"),)),
            )))
        add(Scenario(
            id=f"ramp-eigen-eps{tag}", domain="square",
            description=f"linear source with a rippled weight "
                        f"(eps={eps}); log-concavity defect bound",
            weight=Weight("ramp_bump_perturbed", eps=eps, theta=1.0),
            source=SourceTerm("identity"),
            u0="eigenfunction", needs_strong_convexity=True,
            audits=(AuditSpec(alpha=0.0, beta=1.0, mode="space",
                              include_infinity=False,
                              checks=(("log_bound", "eigen"),)),)))

    return {s.id: s for s in scns}


CATALOG = _catalog()


def scenario_ids():
    return sorted(CATALOG)


def get_scenario(sid: str) -> Scenario:
    if sid not in CATALOG:
        raise KeyError(f"unknown scenario {sid!r}; known: "
                       + ", ".join(scenario_ids()))
    return CATALOG[sid]


# ---------------------------------------------------------------------------
# pipeline helpers
# ---------------------------------------------------------------------------

def build_problem(scn: Scenario, dom=None, eig=None,
                  horizon: float | None = None) -> Problem:
    spec = unit_square() if scn.domain == "square" else disk()
    T = scn.horizon if horizon is None else horizon
    if scn.u0 == "eigenfunction":
        if eig is None:
            raise ValueError("eigenfunction initial data needs the "
                             "eigenpair")
        return Problem(domain=spec, weight=scn.weight, source=scn.source,
                       u0="explicit",
                       u0_values=scn.u0_scale * eig.phi.values,
                       horizon=T, truncate=scn.truncate)
    return Problem(domain=spec, weight=scn.weight, source=scn.source,
                   u0="zero", horizon=T, truncate=scn.truncate)


def hopf_margin(dom, values) -> float:
    """Min inward difference quotient at boundary-adjacent nodes."""
    idx = dom.index_of
    g = np.full(idx.shape, np.nan)
    iy, ix = dom.interior_idx[:, 0], dom.interior_idx[:, 1]
    g[iy, ix] = values
    interior = np.zeros(idx.shape, dtype=bool)
    interior[iy, ix] = True
    pad = np.pad(interior, 1, constant_values=False)
    nbhd = (pad[:-2, 1:-1] & pad[2:, 1:-1] & pad[1:-1, :-2] & pad[1:-1, 2:])
    adjacent = interior & ~nbhd
    frac = np.maximum(dom.fractions.min(axis=1), 1e-3)
    quot = values / (frac * dom.h)
    sel = adjacent[iy, ix]
    return float(np.min(quot[sel])) if sel.any() else math.inf


def boundary_barrier_margin(problem, dom, traj, eig, hyp) -> float:
    """Min over interior snapshots of u / barrier (barrier from the
    certified power lower bound); > 1 means the barrier holds."""
    k = hyp.constants["k"]
    q = hyp.constants["q"]
    gamma = hyp.constants["gamma"]
    params = BoundParams(q=q, gamma=gamma, m=k)
    worst = math.inf
    for t, vals in zip(traj.times, traj.fields):
        if t <= 0.0 or t >= problem.horizon:
            continue
        barrier = boundary_lower_bound(params, "interior_t0", t=t, eig=eig)
        pos = barrier > 1e-14
        if pos.any():
            worst = min(worst, float(np.min(vals[pos] / barrier[pos])))
    return worst


def _weight_min_C(problem, dom, mask=None) -> float:
    """Signed min of the weight's concavity function over node pairs."""
    prof = problem.weight.spatial_profile(dom)
    pts = dom.interior_points
    if mask is not None:
        prof, pts = prof[mask], pts[mask]
    n = len(pts)
    if n < 2:
        return 0.0
    stride = max(1, int(math.ceil(n / 240)))
    prof, pts = prof[::stride], pts[::stride]
    n = len(pts)
    i1, i3 = np.triu_indices(n, k=1)
    worst = math.inf
    for lm in np.linspace(0.0, 1.0, 17)[1:-1]:
        x2 = lm * pts[i3] + (1 - lm) * pts[i1]
        a2 = problem.weight.spatial_at(problem.domain, x2)
        c = a2 - lm * prof[i3] - (1 - lm) * prof[i1]
        worst = min(worst, float(c.min()))
    return worst if math.isfinite(worst) else 0.0


def _quant_params(scn, problem, dom, traj, ev, rep, sup_norm_u_inf, mode):
    """Measured BoundParams for a quantitative mode from the audit
    report's argmin neighborhood."""
    q = scn.source.q if scn.source.kind == "power_q" else 0.0
    m, M = scn.weight.bounds(dom, problem.horizon)
    d1 = float(distance_to_boundary(problem.domain,
                                    np.asarray(rep.argmin.x1)))
    d3 = float(distance_to_boundary(problem.domain,
                                    np.asarray(rep.argmin.x3)))
    rho = max(min(d1, d3), 2 * dom.h)
    mask = inner_region_mask(dom, rho)
    if not mask.any():
        mask = None
    prof = problem.weight.spatial_profile(dom)
    prof_rho = prof if mask is None else prof[mask]
    kw = dict(q=q, m=m, M=M, rho=rho, T=problem.horizon,
              sup_norm_u_inf=sup_norm_u_inf, theta=scn.theta
              if math.isfinite(scn.theta) else 1.0)
    if mode == "oscillation":
        kw["osc_a2"] = float((prof ** 2).max() - (prof ** 2).min())
    elif mode == "rough":
        kw["osc_a"] = float(prof.max() - prof.min())
    elif mode in ("theta", "elliptic_theta"):
        kw["sup_neg_defect"] = weight_concavity_defect(
            problem, dom, theta=kw["theta"])
    elif mode == "prop413":
        kw["inf_a_rho"] = float(prof_rho.min())
        kw["sup_a_rho"] = float(prof_rho.max())
        kw["inf_C_a"] = _weight_min_C(problem, dom, mask)
        grads = np.asarray([g[:2] for g in rep.gradients])
        kw["xi"] = grads.mean(axis=0)
        kw["xi_mismatch"] = rep.gradient_spread
        kw["lam_argmin"] = rep.argmin.lam
        t1, t3 = rep.argmin.t1, rep.argmin.t3
        kw["v1"] = float(ev.value(np.asarray(rep.argmin.x1), t1))
        kw["v3"] = float(ev.value(np.asarray(rep.argmin.x3), t3))
    return BoundParams(**kw)


def _log_bound_inputs(scn, problem, dom, traj, rep):
    """(Lambda, sup weight defect on the inner region, fbar norm)."""
    lam = sup_slope_lambda(scn.source)
    d1 = float(distance_to_boundary(problem.domain,
                                    np.asarray(rep.argmin.x1)))
    d3 = float(distance_to_boundary(problem.domain,
                                    np.asarray(rep.argmin.x3)))
    rho = max(min(d1, d3), 2 * dom.h)
    mask = inner_region_mask(dom, rho)
    sup_defect = weight_concavity_defect(problem, dom, theta=1.0,
                                         mask=mask if mask.any() else None)
    # sup of f(u)/u over the inner region and the snapshots
    fbar = 0.0
    if scn.source.kind not in ("logistic", "power_sum"):
        for vals in traj.fields:
            v = vals[mask] if mask.any() else vals
            pos = v > 1e-12
            if pos.any():
                fbar = max(fbar, float(np.max(scn.source.f(v[pos])
                                              / v[pos])))
    return lam, sup_defect, max(fbar, 1.0 if scn.source.composite else 0.0)


# ---------------------------------------------------------------------------
# scenario runner
# ---------------------------------------------------------------------------

def run_scenario(scn: Scenario, h: float = 1.0 / 64.0,
                 dt: float | None = None, horizon: float | None = None,
                 snapshots: int | None = None,
                 sampler: SamplerConfig | None = None) \
        -> VerificationReport:
    t_start = time.perf_counter()
    report = VerificationReport(scenario_id=scn.id, verdict="pass")
    spec = unit_square() if scn.domain == "square" else disk()
    if scn.needs_strong_convexity and not spec.strongly_convex:
        warnings.warn(f"{scn.id}: the domain is not strongly convex; "
                      "running anyway", UserWarning)
        report.diagnostics["strong_convexity"] = False

    dom = build_discretization(spec, h)
    eig = principal_eigenpair(dom)
    problem = build_problem(scn, dom, eig, horizon)
    hyp = check_hypotheses(problem, M=1.0)
    report.diagnostics["hypotheses"] = dict(hyp.flags)

    # theorem gate: the alpha window for space-time audits
    try:
        for aud in scn.audits:
            if aud.mode == "spacetime" and aud.alpha > 0:
                q = scn.source.q if scn.source.kind == "power_q" else 0.0
                cap = spacetime_alpha_window(q, scn.weight.gamma, aud.beta)
                if not 0.0 < aud.alpha < cap + 1e-12:
                    raise RangeViolation(
                        f"alpha={aud.alpha} outside (0, {cap})")
    except (RangeViolation, ValidityViolation) as exc:
        report.verdict = "not_applicable"
        report.diagnostics["gate_failure"] = str(exc)
        report.runtime = time.perf_counter() - t_start
        return report

    needs_inf = any(a.include_infinity and a.mode == "spacetime"
                    for a in scn.audits)
    count = snapshots if snapshots is not None else (
        max(12, int(round(0.75 / h))) if needs_inf else 16)
    grid = make_time_grid(problem, h, dt, count=count)
    traj = solve_trajectory(problem, dom, grid, dt, eig)
    report.diagnostics["monotone"] = bool(traj.monotone)

    stat = None
    if needs_inf:
        stat = solve_stationary(problem, dom)
        traj.stationary = stat.v.values
        report.diagnostics["stationary_residual"] = stat.residual
        tau_mono = 10.0 * h * h
        report.diagnostics["below_stationary"] = bool(
            np.all(traj.fields[-1] <= stat.v.values + tau_mono))

    if scn.check_hopf:
        late = [k for k, t in enumerate(traj.times) if t >= 0.1]
        margins = [hopf_margin(dom, traj.fields[k]) for k in late]
        report.diagnostics["hopf_min_quotient"] = min(margins) if margins \
            else None
        if margins and min(margins) <= 0:
            report.add_assertion("hopf_positive", False, min(margins), 0.0)

    if scn.check_boundary_barrier and hyp.require("lower_power"):
        ratio = boundary_barrier_margin(problem, dom, traj, eig, hyp)
        report.diagnostics["barrier_min_ratio"] = ratio
        report.add_assertion("boundary_barrier", ratio >= 0.99,
                             ratio, 0.99)

    for aud in scn.audits:
        if aud.checks == (("quasiconcave",),):
            worst = 0.0
            for k in range(0, len(traj.fields), 3):
                if traj.times[k] <= 0:
                    continue
                worst = max(worst, quasiconcavity_defect(
                    Field(dom, traj.fields[k], traj.times[k])))
            report.add_assertion("quasiconcave_snapshots",
                                 worst <= 0.0, -worst, -1e-12)
            continue
        ev = power_transform(traj, aud.alpha, aud.beta)
        cfg = sampler or SamplerConfig(
            include_infinity=aud.include_infinity)
        rep = min_defect(ev, aud.mode, cfg)
        report.defect_reports.append(rep)
        for check in aud.checks:
            if check[0] == "exact":
                report.add_assertion(
                    f"exact_alpha{aud.alpha:g}", rep.minimum >=
                    -rep.tau_audit, rep.minimum, -rep.tau_audit)
            elif check[0] == "quantitative":
                mode = check[1]
                sup_norm = stat.sup_norm if stat is not None else \
                    max(float(np.max(f)) for f in traj.fields)
                try:
                    params = _quant_params(scn, problem, dom, traj, ev,
                                           rep, sup_norm, mode)
                    brep = quantitative_rhs(params, mode)
                except ValidityViolation as exc:
                    report.diagnostics[f"{mode}_gate"] = str(exc)
                    continue
                report.bound_reports.append(brep)
                report.add_assertion(
                    f"quant_{mode}_alpha{aud.alpha:g}",
                    rep.minimum >= brep.rhs - rep.tau_audit,
                    rep.minimum, brep.rhs - rep.tau_audit)
            elif check[0] == "log_bound":
                variant = check[1]
                lam, sup_defect, fbar = _log_bound_inputs(
                    scn, problem, dom, traj, rep)
                rhs = log_concavity_rhs(problem.horizon, lam, sup_defect,
                                        variant, fbar_norm=fbar)
                report.bound_reports.append(BoundReport(
                    bound_id=f"log_{variant}", rhs=rhs,
                    constants={"Lambda": lam, "sup_defect": sup_defect,
                               "fbar_norm": fbar}))
                report.add_assertion(
                    f"log_{variant}",
                    rep.minimum >= rhs - rep.tau_audit,
                    rep.minimum, rhs - rep.tau_audit)

    if any(not a["passed"] for a in report.assertions):
        report.verdict = "fail"
    report.runtime = time.perf_counter() - t_start
    return report


# ---------------------------------------------------------------------------
# randomized property suites
# ---------------------------------------------------------------------------

def _suite_entry(name, margins, skipped, tol=1e-10):
    margins = np.asarray(margins, dtype=float)
    worst = float(margins.min()) if margins.size else 0.0
    return {"name": name, "draws": int(margins.size),
            "skipped": int(skipped),
            "violations": int(np.count_nonzero(margins < -tol)),
            "worst_margin": worst}


def run_property_suite(seed: int = 1, draws: int = 10000) -> dict:
    """Randomized checks of the concavity-function inequalities.

    Returns {"seed", "draws", "results": [entry...], "violations"}.
    """
    if draws < 1:
        raise ValueError("draws must be >= 1")
    rng = np.random.default_rng(seed)
    results = []

    # harmonic concavity dominates concavity (positive endpoint values)
    g1, g3 = np.exp(rng.uniform(-2, 2, (2, draws)))
    g2 = np.exp(rng.uniform(-2, 2, draws))
    lam = rng.uniform(0, 1, draws)
    hc = g2 - g1 * g3 / (lam * g1 + (1 - lam) * g3)
    c = g2 - lam * g3 - (1 - lam) * g1
    results.append(_suite_entry("harmonic_dominates", hc - c, 0))

    # time rescaling: slower time exponents preserve harmonic concavity
    a0 = rng.uniform(0.1, 2, draws)
    a1, a2c, a3 = rng.uniform(0, 2, (3, draws))

    def gfun(t):
        return a0 + a1 * t + a2c * t * t + a3 * np.sqrt(t)

    t1, t3 = rng.uniform(0.01, 3.0, (2, draws))
    beta = rng.uniform(0.05, 1.0, draws)
    lam = rng.uniform(0, 1, draws)
    e1, e3 = gfun(t1 ** beta), gfun(t3 ** beta)
    denom = lam * e1 + (1 - lam) * e3
    lhs = gfun((lam * t3 + (1 - lam) * t1) ** beta) - e1 * e3 / denom
    rhs = gfun(lam * t3 ** beta + (1 - lam) * t1 ** beta) \
        - e1 * e3 / denom
    results.append(_suite_entry("time_rescaling", lhs - rhs, 0))

    # product lower bound with the band side conditions; draws whose
    # values violate the band (min^al >= max^al / 2) are skipped
    al = rng.uniform(1.1, 4.0, draws)
    be = al / (al - 1.0)
    kf = (rng.uniform(0.5, 2.5, draws) * 2.0) ** (1.0 / al)
    f123 = rng.uniform(0.5, 2.0, draws)[None, :] \
        * (1 + rng.uniform(0, 1, (3, draws)) * (kf - 1.0))
    kg = (rng.uniform(0.5, 2.5, draws) * 2.0) ** (1.0 / be)
    g123 = rng.uniform(0.5, 2.0, draws)[None, :] \
        * (1 + rng.uniform(0, 1, (3, draws)) * (kg - 1.0))
    lam = rng.uniform(0, 1, draws)
    f_ok = f123.min(axis=0) ** al >= 0.5 * f123.max(axis=0) ** al
    g_ok = g123.min(axis=0) ** be >= 0.5 * g123.max(axis=0) ** be
    keep = f_ok & g_ok
    al, be, lam = al[keep], be[keep], lam[keep]
    f1, f2, f3 = f123[:, keep]
    g1, g2, g3 = g123[:, keep]
    cf = np.maximum(0.0, -(f2 ** al - lam * f3 ** al
                           - (1 - lam) * f1 ** al)) ** (1.0 / al)
    cg = np.maximum(0.0, -(g2 ** be - lam * g3 ** be
                           - (1 - lam) * g1 ** be)) ** (1.0 / be)
    lhs = f2 * g2 - lam * f3 * g3 - (1 - lam) * f1 * g1
    rhs = -cf * (lam * g3 + (1 - lam) * g1) \
        - cg * (lam * f3 + (1 - lam) * f1) + cf * cg
    results.append(_suite_entry("product_bound", lhs - rhs,
                                int(draws - keep.sum())))

    # quotient by a squared coordinate
    g1, g2, g3 = np.exp(rng.uniform(-1, 1, (3, draws)))
    z1, z3 = rng.uniform(0.5, 2.0, (2, draws))
    lam = rng.uniform(0, 1, draws)
    z2 = lam * z3 + (1 - lam) * z1
    f1, f3 = g1 / z1 ** 2, g3 / z3 ** 2
    hcf = g2 / z2 ** 2 - f1 * f3 / (lam * f1 + (1 - lam) * f3)
    cg = g2 - lam * g3 - (1 - lam) * g1
    results.append(_suite_entry("quotient_bound", hcf - cg / z2 ** 2, 0))

    # subtracting a harmonically concave positive term
    f1, f2, f3 = np.exp(rng.uniform(0.2, 1.5, (3, draws)))
    lam = rng.uniform(0, 1, draws)
    const = rng.uniform(0.05, 0.8, draws)
    gam = rng.uniform(-1.0, 0.0, draws)
    tt1, tt3 = rng.uniform(0.5, 3.0, (2, draws))
    tt2 = lam * tt3 + (1 - lam) * tt1
    use_pow = rng.random(draws) < 0.5
    gg1 = np.where(use_pow, tt1 ** gam, const)
    gg2 = np.where(use_pow, tt2 ** gam, const)
    gg3 = np.where(use_pow, tt3 ** gam, const)
    h1, h2, h3 = f1 - gg1, f2 - gg2, f3 - gg3
    den_h = lam * h1 + (1 - lam) * h3
    den_f = lam * f1 + (1 - lam) * f3
    den_g = lam * gg1 + (1 - lam) * gg3
    ok = (den_h > 1e-9) & (den_f > 1e-9) & (den_g > 1e-9)
    hch = h2[ok] - h1[ok] * h3[ok] / den_h[ok]
    hcf = f2[ok] - f1[ok] * f3[ok] / den_f[ok]
    hcg = gg2[ok] - gg1[ok] * gg3[ok] / den_g[ok]
    margins = hch - (hcf - hcg)
    # the subtracted terms are harmonically concave: certificate
    assert np.all(hcg <= 1e-10)
    results.append(_suite_entry("difference_bound", margins,
                                int(draws - ok.sum())))

    violations = sum(r["violations"] for r in results)
    return {"seed": seed, "draws": draws, "results": results,
            "violations": violations}


def run_suite(ids=None, h: float = 1.0 / 64.0, **kw) -> list:
    """Run every catalog scenario (or the given ids); returns reports
    sorted by scenario id."""
    ids = sorted(ids) if ids is not None else scenario_ids()
    return [run_scenario(get_scenario(sid), h=h, **kw) for sid in ids]
