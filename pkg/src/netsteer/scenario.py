"""Scenario documents: JSON parsing, validation, hashing and bundle construction.

A scenario is either a preset reference::

    {"preset": "lsi-isotropic", "eta": 0.5}

or an explicit description::

    {"criterion": "bell", "n": 1,
     "sources": [{"type": "isotropic", "eta": 0.68}],
     "alice": "diagonal-xz", "bob": "star"}

Explicit matrices are rows of ``[re, im]`` pairs. The JSON schema ships as
``scenario.schema.json`` next to this module.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .criteria import LsiSpec, NonlinearSettings
from .errors import NetsteerError, ScenarioError
from .measurements import QubitBinaryPOVM, observable, povm_from_bloch
from .presets import ALICE_SETS, GHZ_BOB, X_AXIS, Z_AXIS, Bundle, preset, star_bob_observables
from .sampling import ShotPlan
from .states import DensityMatrix, bell_state, ghz, isotropic, star_state

DEFAULT_ALICE = {"nonlinear": "diagonal-xz", "nonlinear-simplified": "diagonal-xz",
                 "lsi": "pauli-xyz", "bell": "diagonal-xz"}
DEFAULT_BOB = {"nonlinear": "xz", "nonlinear-simplified": "xz", "lsi": "pauli", "bell": "star"}
SETTINGS_PER_SOURCE = {"nonlinear": 2, "nonlinear-simplified": 2, "lsi": 3, "bell": 2}


@lru_cache(maxsize=1)
def schema() -> dict:
    text = resources.files("netsteer").joinpath("scenario.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _path(parts) -> str:
    return ".".join(str(p) for p in parts) or "<root>"


def _deepest(error: jsonschema.ValidationError) -> jsonschema.ValidationError:
    """Follow ``oneOf`` branches to the error that names the most specific field."""
    best = error
    for sub in error.context or ():
        cand = _deepest(sub)
        if len(cand.absolute_path) > len(best.absolute_path):
            best = cand
    return best


def validate(data: Any) -> None:
    validator = jsonschema.Draft202012Validator(schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: -len(e.absolute_path))
    if not errors:
        return
    err = _deepest(errors[0])
    if isinstance(data, dict):
        # report against the branch the document was aiming at
        branch = "presetScenario" if "preset" in data else "explicitScenario"
        sub = {**schema()["$defs"][branch], "$defs": schema()["$defs"]}
        sub_errors = list(jsonschema.Draft202012Validator(sub).iter_errors(data))
        if sub_errors:
            err = _deepest(max(sub_errors, key=lambda e: len(e.absolute_path)))
    raise ScenarioError(_path(err.absolute_path), err.message)


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def _matrix(value, field: str) -> np.ndarray:
    rows = len(value)
    if any(len(row) != rows for row in value):
        raise ScenarioError(field, "matrix must be square")
    arr = np.asarray(value, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def _state_matrix(value, field: str) -> DensityMatrix:
    try:
        return DensityMatrix(_matrix(value, field))
    except NetsteerError as exc:
        raise ScenarioError(field, str(exc)) from None


@dataclass(frozen=True, eq=False)
class Scenario:
    """A validated scenario document."""

    data: dict

    @classmethod
    def from_dict(cls, data: Any) -> "Scenario":
        validate(data)
        sc = cls(copy.deepcopy(data))
        sc.build()
        return sc

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError("<document>", f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "Scenario":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ScenarioError("<file>", str(exc)) from None
        return cls.from_json(text)

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.data, indent=indent, sort_keys=True) + "\n"

    @property
    def hash(self) -> str:
        return hashlib.sha256(canonical_json(self.data).encode("ascii")).hexdigest()

    @property
    def name(self) -> str:
        return self.data.get("name") or self.data.get("preset") or self.data["criterion"]

    @property
    def shot_plan(self) -> ShotPlan | None:
        shots = self.data.get("shots")
        return None if shots is None else ShotPlan(shots["shots"], shots.get("seed", 0))

    def get(self, dotted: str):
        node = self.data
        for part in dotted.split("."):
            node = _step(node, part, dotted)
        if isinstance(node, bool) or not isinstance(node, (int, float)):
            raise ScenarioError(dotted, "path does not address a numeric scalar")
        return node

    def with_value(self, dotted: str, value) -> "Scenario":
        """Copy with the scalar at ``dotted`` replaced; integer fields stay integers."""
        current = self.get(dotted)
        if isinstance(current, int):
            value = int(round(value))
        data = copy.deepcopy(self.data)
        parts = dotted.split(".")
        node = data
        for part in parts[:-1]:
            node = _step(node, part, dotted)
        last = parts[-1]
        if isinstance(node, list):
            node[int(last)] = value
        else:
            node[last] = value
        return Scenario.from_dict(data)

    def build(self) -> Bundle:
        if "preset" in self.data:
            d = self.data
            try:
                p = preset(d["preset"], d.get("n"), d.get("eta"))
            except NetsteerError as exc:
                raise ScenarioError("preset", str(exc)) from None
            if d.get("simplified"):
                if p.criterion != "nonlinear":
                    raise ScenarioError("simplified", "only the nonlinear-maxent preset has a simplified form")
                return Bundle("nonlinear-simplified", p.n, p.state, p.alice, p.settings)
            return p
        return _build_explicit(self.data)


def _step(node, part: str, dotted: str):
    try:
        if isinstance(node, list):
            return node[int(part)]
        if isinstance(node, dict):
            return node[part]
    except (KeyError, IndexError, ValueError):
        pass
    raise ScenarioError(dotted, f"no such field {part!r}")


def _sources(d: dict, n: int):
    if "state" in d:
        if d["criterion"] != "bell":
            raise ScenarioError("state", "a global state is only supported by the bell criterion")
        if "sources" in d:
            raise ScenarioError("state", "give either sources or state, not both")
        st = d["state"]
        if st["type"] == "ghz":
            return ghz(n + 1)
        if "matrix" not in st:
            raise ScenarioError("state.matrix", "explicit state needs a matrix")
        rho = _state_matrix(st["matrix"], "state.matrix")
        if rho.dim % 2**n or rho.dim == 2**n:
            raise ScenarioError("state.matrix", f"dimension {rho.dim} leaves no Bob space after {n} Alice qubits")
        return rho
    sources = d.get("sources")
    if sources is None:
        raise ScenarioError("sources", "required unless a global state is given")
    if len(sources) != n:
        raise ScenarioError("sources", f"expected {n} sources, got {len(sources)}")
    mats = []
    for i, src in enumerate(sources):
        field = f"sources.{i}"
        kind = src["type"]
        extra = set(src) - {"type", {"bell": "kind", "isotropic": "eta", "explicit": "matrix"}[kind]}
        if extra:
            raise ScenarioError(f"{field}.{sorted(extra)[0]}", f"not used by a {kind} source")
        if kind == "bell":
            mats.append(bell_state(src.get("kind", "psi+")))
        elif kind == "isotropic":
            if "eta" not in src:
                raise ScenarioError(f"{field}.eta", "isotropic source needs eta")
            mats.append(isotropic(src["eta"]))
        else:
            if "matrix" not in src:
                raise ScenarioError(f"{field}.matrix", "explicit source needs a matrix")
            rho = _state_matrix(src["matrix"], f"{field}.matrix")
            if rho.dim != 4:
                raise ScenarioError(f"{field}.matrix", "each source must be a two-qubit state")
            mats.append(rho)
    return star_state(mats)


def _alice(d: dict, n: int) -> tuple[tuple[QubitBinaryPOVM, ...], ...]:
    spec = d.get("alice", DEFAULT_ALICE[d["criterion"]])
    per_source = spec if isinstance(spec, list) else [spec] * n
    if len(per_source) != n:
        raise ScenarioError("alice", f"expected {n} measurement sets, got {len(per_source)}")
    want = SETTINGS_PER_SOURCE[d["criterion"]]
    out = []
    for i, entry in enumerate(per_source):
        field = "alice" if not isinstance(spec, list) else f"alice.{i}"
        if isinstance(entry, str):
            povms = ALICE_SETS[entry]
        else:
            povms = []
            for j, p in enumerate(entry["povms"]):
                try:
                    povms.append(povm_from_bloch(p.get("k", 0.0), p["r"]))
                except NetsteerError as exc:
                    raise ScenarioError(f"{field}.povms.{j}", str(exc)) from None
            povms = tuple(povms)
        if len(povms) != want:
            raise ScenarioError(field, f"criterion {d['criterion']} needs {want} settings per source")
        out.append(povms)
    return tuple(out)


def _bob_operators_field(bob, field: str, criterion: str):
    if not isinstance(bob, dict) or "operators" not in bob:
        raise ScenarioError(field, f"{bob!r} is not a Bob choice for criterion {criterion}")
    return bob["operators"]


def _build_explicit(d: dict) -> Bundle:
    crit, n = d["criterion"], d["n"]
    state = _sources(d, n)
    alice = _alice(d, n)
    bob = d.get("bob", DEFAULT_BOB[crit])
    try:
        if crit in ("nonlinear", "nonlinear-simplified"):
            if bob == "xz":
                axes = ((X_AXIS, Z_AXIS),) * n
            elif isinstance(bob, dict) and "axes" in bob:
                if len(bob["axes"]) != n:
                    raise ScenarioError("bob.axes", f"expected {n} axis pairs, got {len(bob['axes'])}")
                axes = tuple((np.asarray(a, float), np.asarray(b, float)) for a, b in bob["axes"])
            else:
                raise ScenarioError("bob", f"{bob!r} is not a Bob choice for criterion {crit}")
            settings = NonlinearSettings(alice, axes)
            bundle = Bundle(crit, n, state, alice, settings)
            bundle.evaluate()
            return bundle
        if crit == "lsi":
            if n != 2:
                raise ScenarioError("n", "the linear steering inequality needs n = 2")
            obs = tuple(tuple(observable(p) for p in side) for side in alice)
            if bob in ("pauli", "sbm"):
                return Bundle(crit, n, state, alice, LsiSpec(*obs), bob)
            ops = _bob_operators_field(bob, "bob", crit)
            if not isinstance(ops, list):
                raise ScenarioError("bob.operators", "the LSI needs a list of three Bob operators")
            mats = tuple(_matrix(m, f"bob.operators.{j}") for j, m in enumerate(ops))
            return Bundle(crit, n, state, alice, LsiSpec(*obs, bob=mats), bob.get("measurement", "pauli"))
        alice_obs = tuple(tuple(observable(p) for p in pair) for pair in alice)
        if bob == "star":
            bob_obs = star_bob_observables(alice_obs)
        elif bob == "ghz":
            if n != 2:
                raise ScenarioError("bob", "the ghz Bob settings are defined for n = 2")
            bob_obs = GHZ_BOB
        else:
            ops = _bob_operators_field(bob, "bob", crit)
            if not isinstance(ops, dict):
                raise ScenarioError("bob.operators", "Bell operators are keyed by bit strings")
            bob_obs = {k: _matrix(m, f"bob.operators.{k}") for k, m in ops.items()}
        bundle = Bundle(crit, n, state, alice, (alice_obs, bob_obs))
        bundle.evaluate()
        return bundle
    except ScenarioError:
        raise
    except NetsteerError as exc:
        raise ScenarioError("bob", str(exc)) from None
