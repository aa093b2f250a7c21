"""Run the verification checks over sampled points of catalog metrics.

Every (metric, point, check) triple yields exactly one :class:`CheckRecord`
with status ``pass``, ``fail``, ``error`` or ``n/a``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import oracle
from .catalog import MetricSpec, build_metric, sample_points
from .conventions import LORENTZIAN
from .curvature import CurvaturePack, MetricField, build_pack
from .tolerances import DEFAULT, Tolerances
from .verify import (
    IDENTITIES,
    KAPPA,
    IdentityReport,
    chen_vector,
    concircular_coefficients,
    concircular_fit,
    derived_identities,
    fit_recurrence_pack,
    fluid_extract,
    psi_gradient_check,
    riemann_symmetry_residuals,
    synth_qcc,
)
from .verify.identities import identity_suite, report

CHECKS = ("concircular", "derived", "fluid", "identities", "oracle_fd", "recurrence_fit", "synth_qcc")
# the catalog holds no extended-recurrent metric, so these two are informational
INFORMATIONAL = frozenset({"recurrence_fit", "derived"})


@dataclass
class CheckRecord:
    metric_index: int
    metric: str
    point_index: int
    point: list
    check: str
    status: str
    required: bool
    residual: Optional[float] = None
    message: str = ""
    details: dict = field(default_factory=dict)

    @property
    def sort_key(self):
        return (self.metric_index, self.point_index, self.check)

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "status": self.status,
            "required": self.required,
            "residual": self.residual,
            "message": self.message,
            "details": self.details,
        }


@dataclass
class _Context:
    spec: MetricSpec
    field: MetricField
    point: np.ndarray
    pack: CurvaturePack
    tol: Tolerances
    kappa: float
    rng: np.random.Generator
    fit: object = None

    def recurrence(self):
        if self.fit is None:
            self.fit = fit_recurrence_pack(self.pack, self.tol)
        return self.fit


def _fold(reports: Sequence[IdentityReport]) -> tuple[str, Optional[float], dict]:
    """Combine several reports into one status and the largest residual."""
    live = [r for r in reports if r.applicable]
    details = {r.name: r.to_json() for r in reports}
    if not live:
        return "n/a", None, details
    status = "pass" if all(r.passed for r in live) else "fail"
    return status, max(r.residual for r in live), details


def _identities(ctx: _Context):
    pack, n = ctx.pack, ctx.pack.dimension
    which = [w for w in IDENTITIES if n >= 4 or not w.startswith("weyl")]
    sym = riemann_symmetry_residuals(pack.riemann_lower.components)
    reports = [report("riemann_symmetries", max(sym.values()), ctx.tol.riemann_symmetries, pack)]
    reports += identity_suite(pack, which, ctx.tol)
    return _fold(reports)


def _recurrence_fit(ctx: _Context):
    fit = ctx.recurrence()
    details = fit.to_json()
    if fit.degenerate:
        return "n/a", fit.residual, {**details, "note": "degenerate fit (no recurrence structure)"}
    psi_check = psi_gradient_check(ctx.field, ctx.point, fit, tol=ctx.tol)
    details["psi_gradient"] = psi_check.to_json()
    ok = fit.residual <= ctx.tol.fit_residual and psi_check.status != "fail"
    return ("pass" if ok else "fail"), fit.residual, details


def _derived(ctx: _Context):
    return _fold(derived_identities(ctx.pack, ctx.recurrence(), ctx.tol))


def _synth_qcc(ctx: _Context):
    n = ctx.pack.dimension
    if n < 3:
        return "n/a", None, {"note": "quasi-constant curvature needs n >= 3"}
    m = ctx.pack.metric_at_point
    while True:
        A = ctx.rng.normal(size=n)
        A2 = float(A @ m.inverse @ A)
        if abs(A2) > 1e-3 * float(A @ A):
            break
    psi, b = ctx.rng.uniform(-2.0, 2.0, size=2)
    status, residual, details = _fold(synth_qcc(m, A, float(psi), float(b), ctx.tol))
    details["inputs"] = {"A": A.tolist(), "psi": float(psi), "b": float(b)}
    return status, residual, details


def _concircular(ctx: _Context):
    X, variance, rho_exact, concircular = chen_vector(ctx.spec)
    fit = concircular_fit(ctx.field, X, ctx.point, variance, ctx.pack)
    details = fit.to_json()
    expected = rho_exact(ctx.point)
    details["rho_expected"] = expected
    details["concircular_expected"] = concircular
    rec = ctx.recurrence()
    if not rec.degenerate:
        details["closed_form"] = concircular_coefficients(ctx.pack, rec)
    if not concircular:
        # a control must stay clearly away from the concircular form
        ok = fit.relative_residual > ctx.tol.control_separation
        return ("pass" if ok else "fail"), fit.relative_residual, details
    rho_err = abs(fit.chen_rho - expected) / max(1.0, abs(expected))
    details["rho_error"] = rho_err
    residual = max(fit.chen_residual, rho_err)
    return ("pass" if residual <= ctx.tol.concircular else "fail"), residual, details


def _fluid(ctx: _Context):
    if ctx.pack.metric_at_point.signature != LORENTZIAN:
        return "n/a", None, {"note": "fluid extraction needs a Lorentzian metric"}
    u = np.zeros(ctx.pack.dimension)
    u[0] = 1.0
    state = fluid_extract(ctx.pack, u, ctx.kappa)
    details = state.to_json()
    ok = state.isotropy_residual <= ctx.tol.fluid_isotropy and state.eos_residual <= ctx.tol.fluid_eos
    return ("pass" if ok else "fail"), max(state.isotropy_residual, state.eos_residual), details


def _oracle_fd(ctx: _Context):
    gamma_fd = oracle.fd_christoffel(ctx.field, ctx.point)
    riem_fd, scale = oracle.fd_riemann(ctx.field, ctx.point, return_scale=True)
    eg = oracle.relative_error(ctx.pack.gamma.components, gamma_fd)
    er = oracle.relative_error(ctx.pack.riemann.components, riem_fd, scale)
    residual = max(eg, er)
    details = {"christoffel_relative": eg, "riemann_relative": er}
    return ("pass" if residual <= ctx.tol.fd_relative else "fail"), residual, details


RUNNERS: dict[str, Callable[[_Context], tuple]] = {
    "concircular": _concircular,
    "derived": _derived,
    "fluid": _fluid,
    "identities": _identities,
    "oracle_fd": _oracle_fd,
    "recurrence_fit": _recurrence_fit,
    "synth_qcc": _synth_qcc,
}


def point_seed(seed: int, metric_index: int) -> int:
    return int(np.random.SeedSequence([seed, metric_index]).generate_state(1)[0])


def _error(message: str) -> str:
    return message.splitlines()[0] if message else "error"


def run_checks(specs: Sequence[MetricSpec], checks: Sequence[str], points_per_metric: int, seed: int,
               tol: Tolerances = DEFAULT, kappa: float = KAPPA) -> list[CheckRecord]:
    """Evaluate ``checks`` at ``points_per_metric`` sampled points of each metric."""
    checks = sorted(set(checks))
    unknown = [c for c in checks if c not in RUNNERS]
    if unknown:
        raise ValueError(f"unknown checks {unknown}; expected a subset of {CHECKS}")
    records: list[CheckRecord] = []
    for mi, spec in enumerate(specs):
        label = spec.label

        def emit(pi, point, check, status, residual=None, message="", details=None):
            records.append(CheckRecord(mi, label, pi, point, check, status, check not in INFORMATIONAL,
                                       residual, message, details or {}))

        try:
            f = build_metric(spec)
            points = sample_points(spec, points_per_metric, point_seed(seed, mi))
        except Exception as exc:  # noqa: BLE001 - reported, never raised
            for pi in range(points_per_metric):
                for check in checks:
                    emit(pi, [], check, "error", message=_error(f"{type(exc).__name__}: {exc}"))
            continue
        for pi, point in enumerate(points):
            plist = [float(x) for x in point]
            rng = np.random.default_rng([seed, mi, pi])
            try:
                pack = build_pack(f, point, 4)
            except Exception as exc:  # noqa: BLE001
                for check in checks:
                    emit(pi, plist, check, "error", message=_error(f"{type(exc).__name__}: {exc}"))
                continue
            ctx = _Context(spec, f, point, pack, tol, kappa, rng)
            for check in checks:
                try:
                    status, residual, details = RUNNERS[check](ctx)
                except Exception as exc:  # noqa: BLE001
                    emit(pi, plist, check, "error", message=_error(f"{type(exc).__name__}: {exc}"))
                    continue
                if residual is not None and not math.isfinite(residual):
                    residual = None
                emit(pi, plist, check, status, residual, details=details)
    records.sort(key=lambda r: r.sort_key)
    return records


def exit_status(records: Sequence[CheckRecord]) -> int:
    """0 when every required check passed (n/a allowed) and nothing errored, else 1."""
    for r in records:
        if r.status == "error" or (r.required and r.status == "fail"):
            return 1
    return 0
