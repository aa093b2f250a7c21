"""Every pass/fail threshold in one place."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterable, Mapping


@dataclass(frozen=True)
class Tolerances:
    # engine identities (normalized residuals)
    riemann_symmetries: float = 1e-9
    weyl_traces: float = 1e-9
    second_bianchi: float = 1e-8
    weyl_bianchi: float = 1e-8
    lovelock: float = 1e-7
    # jets vs central differences, relative
    fd_relative: float = 1e-5
    # conformal flatness and quasi-Einstein form
    weyl_vanishing: float = 1e-8
    quasi_einstein: float = 1e-8
    # extended-recurrence fitter
    fit_residual: float = 1e-10
    fit_recovery: float = 1e-8
    degenerate: float = 1e-12
    grad_scalar: float = 1e-8
    derived: float = 1e-8
    psi_gradient: float = 1e-4
    # quasi-constant-curvature algebra
    qcc: float = 1e-10
    # concircular vector
    concircular: float = 1e-8
    # perfect fluid
    fluid_isotropy: float = 1e-8
    fluid_eos: float = 1e-8
    # separation required of non-conformally-flat / non-recurrent controls
    control_separation: float = 1e-3

    def replace(self, **overrides: float) -> "Tolerances":
        unknown = sorted(set(overrides) - set(self.names()))
        if unknown:
            raise KeyError(f"unknown tolerance(s): {', '.join(unknown)}")
        return dataclasses.replace(self, **{k: float(v) for k, v in overrides.items()})

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in dataclasses.fields(cls)]

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, float]) -> "Tolerances":
        return cls().replace(**mapping)


def parse_overrides(items: Iterable[str]) -> dict[str, float]:
    """Parse ``NAME=VALUE`` strings."""
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"tolerance override {item!r} is not NAME=VALUE")
        name = name.strip()
        if name not in Tolerances.names():
            raise KeyError(f"unknown tolerance {name!r}")
        out[name] = float(value)
    return out


DEFAULT = Tolerances()
