"""Packaged scenarios with known quantum values."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .assemblages import CorrelationTable, born_correlations
from .criteria import (
    CriterionReport,
    LsiSpec,
    NonlinearSettings,
    TableCriterion,
    a_gamma_operator,
    bell_criterion,
    eval_bell,
    eval_lsi,
    eval_nonlinear,
    eval_nonlinear_simplified,
    lsi_criterion,
    nonlinear_criterion,
)
from .errors import PreconditionError
from .measurements import QubitBinaryPOVM, observable, pauli, povm_from_bloch
from .states import bell_state, ghz, isotropic, star_state

_S = 1 / math.sqrt(2)
X_AXIS = np.array([1.0, 0.0, 0.0])
Z_AXIS = np.array([0.0, 0.0, 1.0])

# A1 +- A2 = sqrt2 sigma_x / sqrt2 sigma_z
DIAGONAL_XZ = (povm_from_bloch(0, (_S, 0, _S)), povm_from_bloch(0, (_S, 0, -_S)))
# A1 +- A2 = sqrt2 sigma_x / sqrt2 sigma_y
DIAGONAL_XY = (povm_from_bloch(0, (_S, _S, 0)), povm_from_bloch(0, (_S, -_S, 0)))
PAULI_XZ = (povm_from_bloch(0, X_AXIS), povm_from_bloch(0, Z_AXIS))
PAULI_XYZ = tuple(povm_from_bloch(0, np.eye(3)[j]) for j in range(3))

ALICE_SETS: dict[str, tuple[QubitBinaryPOVM, ...]] = {
    "pauli-xz": PAULI_XZ,
    "pauli-xyz": PAULI_XYZ,
    "diagonal-xz": DIAGONAL_XZ,
    "diagonal-xy": DIAGONAL_XY,
}


@dataclass(frozen=True, eq=False)
class Bundle:
    """A state together with everything needed to evaluate one criterion on it.

    ``settings`` is a :class:`NonlinearSettings`, an :class:`LsiSpec` or a
    pair ``(alice_observables, bob_observables)`` depending on ``criterion``.
    ``bob_measurement`` selects how an LSI table is measured on Bob's side.
    """

    criterion: str
    n: int
    state: Any
    alice: tuple[tuple[QubitBinaryPOVM, ...], ...]
    settings: Any
    bob_measurement: str = "pauli"

    def evaluate(self, scenario: str = "") -> CriterionReport:
        if self.criterion == "nonlinear":
            return eval_nonlinear(self.state, self.settings, scenario)
        if self.criterion == "nonlinear-simplified":
            return eval_nonlinear_simplified(self.state, self.settings, scenario)
        if self.criterion == "lsi":
            return eval_lsi(self.state, self.settings, scenario)
        if self.criterion == "bell":
            alice_obs, bob_obs = self.settings
            return eval_bell(self.state, alice_obs, bob_obs, scenario=scenario)
        raise PreconditionError(f"unknown criterion {self.criterion!r}")

    def table_criterion(self) -> TableCriterion:
        if self.criterion in ("nonlinear", "nonlinear-simplified"):
            return nonlinear_criterion(self.settings, self.criterion == "nonlinear-simplified")
        if self.criterion == "lsi":
            return lsi_criterion(self.settings, self.bob_measurement)
        if self.criterion == "bell":
            return bell_criterion(*self.settings)
        raise PreconditionError(f"unknown criterion {self.criterion!r}")

    def correlations(self) -> CorrelationTable:
        crit = self.table_criterion()
        return born_correlations(self.state, crit.alice_povms, crit.bob_povms)


@dataclass(frozen=True, eq=False, kw_only=True)
class Preset(Bundle):
    name: str
    expected_value: float
    expected_ratio: float
    description: str


PRESETS = {
    "nonlinear-maxent": "maximally entangled sources, nonlinear criterion; ratio sqrt(2) for every n",
    "lsi-isotropic": "two isotropic sources, Pauli measurements, linear inequality; value 3*eta^2, bound 1",
    "bell-ghz": "three-qubit GHZ state, two Alices and Bob, Bell inequality; value 8, bound 4, ratio 2",
    "bell-star": "maximally entangled sources, Bell inequality; value (2*sqrt(2))^n, ratio sqrt(2)^n",
}


def _observables(povms) -> tuple[np.ndarray, ...]:
    return tuple(observable(p) for p in povms)


def star_bob_observables(alice_obs) -> dict[tuple[int, ...], np.ndarray]:
    """Bob measures ``A_gamma / sqrt(2)^n`` on his n qubits."""
    n = len(alice_obs)
    return {g: a_gamma_operator(g, alice_obs) / math.sqrt(2) ** n
            for g in itertools.product((0, 1), repeat=n)}


GHZ_BOB = {
    (0, 0): pauli(1),
    (0, 1): -pauli(2),
    (1, 0): -pauli(2),
    (1, 1): -pauli(1),
}


def nonlinear_maxent(n: int = 2, simplified: bool = False) -> Preset:
    s = star_state([bell_state("psi+")] * n)
    settings = NonlinearSettings((DIAGONAL_XZ,) * n, ((X_AXIS, Z_AXIS),) * n)
    crit = "nonlinear-simplified" if simplified else "nonlinear"
    return Preset(criterion=crit, n=n, state=s, alice=settings.alice, settings=settings,
                  name="nonlinear-maxent", expected_value=math.sqrt(2), expected_ratio=math.sqrt(2),
                  description=PRESETS["nonlinear-maxent"])


def lsi_isotropic(eta: float = 1.0) -> Preset:
    s = star_state([isotropic(eta), isotropic(eta)])
    return Preset(criterion="lsi", n=2, state=s, alice=(PAULI_XYZ, PAULI_XYZ), settings=LsiSpec.pauli(),
                  name="lsi-isotropic", expected_value=3 * eta**2, expected_ratio=3 * eta**2,
                  description=PRESETS["lsi-isotropic"])


def bell_ghz() -> Preset:
    alice = (DIAGONAL_XY, DIAGONAL_XY)
    alice_obs = tuple(_observables(p) for p in alice)
    return Preset(criterion="bell", n=2, state=ghz(3), alice=alice, settings=(alice_obs, GHZ_BOB),
                  name="bell-ghz", expected_value=8.0, expected_ratio=2.0, description=PRESETS["bell-ghz"])


def bell_star(n: int = 2) -> Preset:
    alice = (DIAGONAL_XZ,) * n
    alice_obs = tuple(_observables(p) for p in alice)
    s = star_state([bell_state("psi+")] * n)
    return Preset(criterion="bell", n=n, state=s, alice=alice, settings=(alice_obs, star_bob_observables(alice_obs)),
                  name="bell-star", expected_value=(2 * math.sqrt(2)) ** n, expected_ratio=math.sqrt(2) ** n,
                  description=PRESETS["bell-star"])


def preset(name: str, n: int | None = None, eta: float | None = None) -> Preset:
    if name == "nonlinear-maxent":
        return nonlinear_maxent(2 if n is None else n)
    if name == "lsi-isotropic":
        _fixed_n(name, n, 2)
        return lsi_isotropic(1.0 if eta is None else eta)
    if name == "bell-ghz":
        _fixed_n(name, n, 2)
        return bell_ghz()
    if name == "bell-star":
        return bell_star(2 if n is None else n)
    raise PreconditionError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}")


def _fixed_n(name: str, n, expected: int):
    if n is not None and n != expected:
        raise PreconditionError(f"preset {name} is defined for n={expected}")


def list_presets() -> list[dict]:
    out = []
    for name, desc in PRESETS.items():
        p = preset(name)
        out.append({"name": name, "criterion": p.criterion, "n": p.n,
                    "expected_ratio": p.expected_ratio, "description": desc})
    return out
