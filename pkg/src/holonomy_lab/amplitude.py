"""Holonomy amplitude of loops and checks of its algebraic properties.

For U(1) the transport path is lifted to the universal cover R by summing the
principal logarithms of consecutive step ratios, which keeps track of full
turns. For SU(2) (simply connected) the amplitude is the geodesic distance
from the identity to the holonomy. SO(n) uses the same geodesic value on the
group itself; its lift to Spin(n) is not attempted.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import lie
from .connection import Connection, GaugeField, gauge_transform
from .errors import CutLocus, EndpointMismatch, PathNotClosed, WrongGroup
from .lie import GroupElement
from .transport import (CLOSED_TOL, DEFAULT_STEPS, Path, TransportResult,
                        concatenate, parallel_transport, reverse,
                        step_generators)

ABELIAN_TOL = 1e-7
NONABELIAN_TOL = 1e-6


@dataclass(frozen=True)
class AmplitudeValue:
    value: float
    method: str  # "winding-lift" or "geodesic-log"
    loop: str = ""


@dataclass
class VerificationReport:
    scenario: str
    lhs: float
    rhs: float
    tolerance: float
    passed: bool
    slack: float
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("lhs", "rhs", "tolerance", "slack"):
            setattr(self, name, float(getattr(self, name)))
        self.passed = bool(self.passed)

    def as_row(self) -> dict:
        return {
            "scenario_id": self.scenario,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "N": self.diagnostics.get("N", ""),
            "grid": self.diagnostics.get("grid", ""),
            "seed": self.diagnostics.get("seed", ""),
        }


def winding_phase(result: TransportResult) -> float:
    """Accumulated phase of a U(1) transport, lifted to R.

    Valid while each step turns by less than pi.
    """
    z = result.mats[:, 0, 0]
    return float(-np.sum(np.angle(z[1:] * np.conj(z[:-1]))))


def amplitude_of_transport(result: TransportResult, label: str = "") -> AmplitudeValue:
    if result.kind.tag == "U1":
        return AmplitudeValue(abs(winding_phase(result)), "winding-lift", label)
    ident = GroupElement.identity(result.kind)
    return AmplitudeValue(lie.geodesic_distance(ident, result.final), "geodesic-log", label)


def amplitude(conn: Connection, loop: Path, steps: int = DEFAULT_STEPS) -> AmplitudeValue:
    """Holonomy amplitude; raises ``CutLocus`` for an antipodal SU(2) holonomy."""
    if not loop.closed:
        raise PathNotClosed(f"{loop.label} is not closed")
    return amplitude_of_transport(parallel_transport(conn, loop, steps), loop.label)


def abelian_amplitude_integral(conn: Connection, loop: Path, steps: int = DEFAULT_STEPS) -> float:
    """|integral of gamma^* omega| by the midpoint rule (U(1) only)."""
    if conn.kind.tag != "U1":
        raise WrongGroup(f"line-integral formula needs U(1), got {conn.kind}")
    if not loop.closed:
        raise PathNotClosed(f"{loop.label} is not closed")
    gens = step_generators(conn, loop, steps)
    return float(abs(np.sum(gens[:, 0, 0].imag) / steps))


def _loops_at_same_point(gamma: Path, eta: Path):
    if np.linalg.norm(gamma.end - eta.start) > CLOSED_TOL:
        raise EndpointMismatch(f"{gamma.label} ends at {gamma.end}, {eta.label} starts at {eta.start}")


def check_subadditivity(conn: Connection, gamma: Path, eta: Path, steps: int = DEFAULT_STEPS,
                        scenario: str = "subadditivity") -> VerificationReport:
    """ampl(gamma . eta) <= ampl(gamma) + ampl(eta) for two loops at one base point."""
    _loops_at_same_point(gamma, eta)
    lhs = amplitude(conn, concatenate(gamma, eta), 2 * steps).value
    rhs = amplitude(conn, gamma, steps).value + amplitude(conn, eta, steps).value
    tol = ABELIAN_TOL
    return VerificationReport(scenario, lhs, rhs, tol, lhs <= rhs + tol, rhs - lhs, {"N": steps})


def check_conjugation_invariance(conn: Connection, gamma: Path, eta: Path, steps: int = DEFAULT_STEPS,
                                 scenario: str = "conjugation") -> VerificationReport:
    """ampl(rev(eta) . gamma . eta) = ampl(gamma) when eta starts at gamma's base point."""
    if not gamma.closed:
        raise PathNotClosed(f"{gamma.label} is not closed")
    if np.linalg.norm(eta.start - gamma.start) > CLOSED_TOL:
        raise EndpointMismatch("eta must start at the base point of gamma")
    conj = concatenate(concatenate(reverse(eta), gamma), eta)
    lhs = amplitude(conn, conj, 4 * steps).value
    rhs = amplitude(conn, gamma, steps).value
    gap = abs(lhs - rhs)
    tol = NONABELIAN_TOL
    return VerificationReport(scenario, lhs, rhs, tol, gap <= tol, -gap, {"N": steps})


def check_gauge_invariance(conn: Connection, gauge: GaugeField, loop: Path, steps: int = DEFAULT_STEPS,
                           scenario: str = "gauge") -> VerificationReport:
    lhs = amplitude(conn, loop, steps).value
    rhs = amplitude(gauge_transform(conn, gauge), loop, steps).value
    gap = abs(lhs - rhs)
    tol = NONABELIAN_TOL
    return VerificationReport(scenario, lhs, rhs, tol, gap <= tol, -gap, {"N": steps})


__all__ = [
    "AmplitudeValue", "VerificationReport", "CutLocus", "amplitude", "amplitude_of_transport",
    "abelian_amplitude_integral", "winding_phase", "check_subadditivity",
    "check_conjugation_invariance", "check_gauge_invariance",
]
