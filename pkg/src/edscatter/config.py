"""Run configuration: strict parsing, validation, canonical serialization.

The on-disk format is a single JSON document.  Complex numbers are written
as two-element arrays [re, im] so no locale-dependent "a+bi" parsing is
involved.  Parsing is strict: unknown keys are rejected with a message
naming the key, and ``parse_config(serialize_config(c))`` returns ``c``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from .bound_states import BoundStateSpec, MatrixTriplet, assemble_triplet
from .errors import ConfigError
from .marchenko import (GaussianReflection, MarchenkoGrid, RationalReflection,
                        ScatteringDataset)

COMMANDS = ("reflectionless", "marchenko", "direct", "bridge", "roundtrip",
            "verify")
FORMATS = ("csv", "json")

Complex = complex
Matrix = tuple[tuple[complex, ...], ...]


def _fail(path: str, message: str) -> ConfigError:
    return ConfigError(f"key '{path}': {message}", key=path)


def _need_mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise _fail(path, "expected an object")
    return value

def _reject_unknown(data: dict, known: tuple[str, ...], path: str) -> None:
    for key in sorted(set(data) - set(known)):
        where = f"{path}.{key}" if path else key
        raise _fail(where, "unknown key")


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(path, "expected a number")
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail(path, "expected an integer")
    return value


def _complex_pair(value, path: str) -> complex:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float))
                   for v in value)):
        raise _fail(path, "expected a complex number as [re, im]")
    return complex(float(value[0]), float(value[1]))


def _matrix(value, path: str) -> Matrix:
    if not isinstance(value, (list, tuple)) or not value:
        raise _fail(path, "expected a non-empty list of rows")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, (list, tuple)) or not row:
            raise _fail(f"{path}[{i}]", "expected a non-empty row")
        rows.append(tuple(_complex_pair(v, f"{path}[{i}][{j}]")
                          for j, v in enumerate(row)))
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise _fail(path, "rows have unequal lengths")
    return tuple(rows)


def _complex_out(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _matrix_out(m: Matrix) -> list[list[list[float]]]:
    return [[_complex_out(v) for v in row] for row in m]


# =============================================================================
# Pieces of the configuration
# =============================================================================

@dataclass(frozen=True)
class GridSpec:
    """Uniform evaluation grid: ``count`` points from ``lo`` to ``hi``."""

    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError(f"grid count must be positive, got {self.count}")
        if self.count > 1 and not self.hi > self.lo:
            raise ConfigError(f"grid must be increasing, got [{self.lo}, {self.hi}]")

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)

    @staticmethod
    def parse(data, path: str) -> "GridSpec":
        data = _need_mapping(data, path)
        _reject_unknown(data, ("min", "max", "count"), path)
        for key in ("min", "max", "count"):
            if key not in data:
                raise _fail(f"{path}.{key}", "missing")
        try:
            return GridSpec(_number(data["min"], f"{path}.min"),
                            _number(data["max"], f"{path}.max"),
                            _integer(data["count"], f"{path}.count"))
        except ConfigError as exc:
            if exc.key is None:
                raise _fail(path, str(exc)) from exc
            raise

    def out(self) -> dict:
        return {"min": self.lo, "max": self.hi, "count": self.count}


@dataclass(frozen=True)
class BoundStateEntry:
    """One pole of the bound-state list form of a triplet."""

    lam: complex
    multiplicity: int
    norming: tuple[complex, ...]

    @staticmethod
    def parse(data, path: str) -> "BoundStateEntry":
        data = _need_mapping(data, path)
        _reject_unknown(data, ("lambda", "multiplicity", "norming"), path)
        if "lambda" not in data:
            raise _fail(f"{path}.lambda", "missing")
        if "norming" not in data:
            raise _fail(f"{path}.norming", "missing")
        lam = _complex_pair(data["lambda"], f"{path}.lambda")
        raw = data["norming"]
        if not isinstance(raw, (list, tuple)) or not raw:
            raise _fail(f"{path}.norming", "expected a non-empty list")
        norming = tuple(_complex_pair(v, f"{path}.norming[{j}]")
                        for j, v in enumerate(raw))
        mult = (_integer(data["multiplicity"], f"{path}.multiplicity")
                if "multiplicity" in data else len(norming))
        if mult != len(norming):
            raise _fail(f"{path}.multiplicity",
                        f"{mult} does not match {len(norming)} norming constants")
        return BoundStateEntry(lam, mult, norming)

    def out(self) -> dict:
        return {"lambda": _complex_out(self.lam),
                "multiplicity": self.multiplicity,
                "norming": [_complex_out(c) for c in self.norming]}


@dataclass(frozen=True)
class TripletSpec:
    """A matrix triplet, either as raw (A, B, C) or as a bound-state list."""

    A: Matrix | None = None
    B: Matrix | None = None
    C: Matrix | None = None
    bound_states: tuple[BoundStateEntry, ...] | None = None

    @staticmethod
    def parse(data, path: str) -> "TripletSpec":
        data = _need_mapping(data, path)
        _reject_unknown(data, ("A", "B", "C", "bound_states"), path)
        raw_form = any(k in data for k in ("A", "B", "C"))
        list_form = "bound_states" in data
        if raw_form and list_form:
            raise _fail(path, "give either matrices A, B, C or bound_states, not both")
        if list_form:
            entries = data["bound_states"]
            if not isinstance(entries, (list, tuple)):
                raise _fail(f"{path}.bound_states", "expected a list")
            states = tuple(BoundStateEntry.parse(e, f"{path}.bound_states[{i}]")
                           for i, e in enumerate(entries))
            return TripletSpec(bound_states=states)
        for key in ("A", "B", "C"):
            if key not in data:
                raise _fail(f"{path}.{key}", "missing")
        a = _matrix(data["A"], f"{path}.A")
        b = _matrix(data["B"], f"{path}.B")
        c = _matrix(data["C"], f"{path}.C")
        n = len(a)
        if len(a[0]) != n:
            raise _fail(f"{path}.A", f"matrix must be square, got {n}x{len(a[0])}")
        if len(b) != n or len(b[0]) != 1:
            raise _fail(f"{path}.B", f"expected a {n}x1 column")
        if len(c) != 1 or len(c[0]) != n:
            raise _fail(f"{path}.C", f"expected a 1x{n} row")
        return TripletSpec(A=a, B=b, C=c)

    def resolve(self, side: str) -> MatrixTriplet:
        if self.bound_states is not None:
            specs = [BoundStateSpec(e.lam, e.multiplicity, e.norming, side=side)
                     for e in self.bound_states]
            return assemble_triplet(specs, side=side)
        return MatrixTriplet(np.array(self.A, dtype=np.complex128),
                             np.array(self.B, dtype=np.complex128),
                             np.array(self.C, dtype=np.complex128))

    def out(self) -> dict:
        if self.bound_states is not None:
            return {"bound_states": [e.out() for e in self.bound_states]}
        return {"A": _matrix_out(self.A), "B": _matrix_out(self.B),
                "C": _matrix_out(self.C)}


@dataclass(frozen=True)
class ReflectionSpec:
    """A reflection-coefficient profile descriptor."""

    kind: str
    poles: tuple[complex, ...] = ()
    residues: tuple[complex, ...] = ()
    amplitude: complex = 0.0j
    width: float = 1.0

    @staticmethod
    def parse(data, path: str) -> "ReflectionSpec":
        data = _need_mapping(data, path)
        if "type" not in data:
            raise _fail(f"{path}.type", "missing")
        kind = data["type"]
        if kind == "rational":
            _reject_unknown(data, ("type", "poles", "residues"), path)
            for key in ("poles", "residues"):
                if key not in data:
                    raise _fail(f"{path}.{key}", "missing")
                if not isinstance(data[key], (list, tuple)) or not data[key]:
                    raise _fail(f"{path}.{key}", "expected a non-empty list")
            poles = tuple(_complex_pair(v, f"{path}.poles[{j}]")
                          for j, v in enumerate(data["poles"]))
            residues = tuple(_complex_pair(v, f"{path}.residues[{j}]")
                             for j, v in enumerate(data["residues"]))
            if len(poles) != len(residues):
                raise _fail(f"{path}.residues",
                            "one residue per pole is required")
            return ReflectionSpec("rational", poles=poles, residues=residues)
        if kind == "gaussian":
            _reject_unknown(data, ("type", "amplitude", "width"), path)
            for key in ("amplitude", "width"):
                if key not in data:
                    raise _fail(f"{path}.{key}", "missing")
            amp = _complex_pair(data["amplitude"], f"{path}.amplitude")
            width = _number(data["width"], f"{path}.width")
            if width <= 0:
                raise _fail(f"{path}.width", "must be positive")
            return ReflectionSpec("gaussian", amplitude=amp, width=width)
        raise _fail(f"{path}.type",
                    f"unknown reflection type {kind!r} (rational or gaussian)")

    def resolve(self):
        if self.kind == "rational":
            return RationalReflection(self.poles, self.residues)
        return GaussianReflection(self.amplitude, self.width)

    def out(self) -> dict:
        if self.kind == "rational":
            return {"type": "rational",
                    "poles": [_complex_out(p) for p in self.poles],
                    "residues": [_complex_out(r) for r in self.residues]}
        return {"type": "gaussian", "amplitude": _complex_out(self.amplitude),
                "width": self.width}


_MARCHENKO_KEYS = ("n", "L", "refine", "solver", "tail_tol", "condition_cap")


@dataclass(frozen=True)
class MarchenkoParams:
    """Knobs of the Nystrom solver, mirrored onto :class:`MarchenkoGrid`."""

    n: int = 200
    L: float = 20.0
    refine: int = 4
    solver: str = "auto"
    tail_tol: float = 1e-7
    condition_cap: float = 1e12

    @staticmethod
    def parse(data, path: str) -> "MarchenkoParams":
        data = _need_mapping(data, path)
        _reject_unknown(data, _MARCHENKO_KEYS, path)
        base = MarchenkoParams()
        kw = {}
        if "n" in data:
            kw["n"] = _integer(data["n"], f"{path}.n")
        if "L" in data:
            kw["L"] = _number(data["L"], f"{path}.L")
        if "refine" in data:
            kw["refine"] = _integer(data["refine"], f"{path}.refine")
        if "solver" in data:
            if data["solver"] not in ("auto", "dense", "separable"):
                raise _fail(f"{path}.solver", "expected auto, dense, or separable")
            kw["solver"] = data["solver"]
        if "tail_tol" in data:
            kw["tail_tol"] = _number(data["tail_tol"], f"{path}.tail_tol")
        if "condition_cap" in data:
            kw["condition_cap"] = _number(data["condition_cap"], f"{path}.condition_cap")
        params = replace(base, **kw)
        try:
            params.to_grid()
        except ValueError as exc:
            raise _fail(path, str(exc)) from exc
        return params

    def to_grid(self) -> MarchenkoGrid:
        return MarchenkoGrid(n=self.n, L=self.L, refine=self.refine,
                             solver=self.solver, tail_tol=self.tail_tol,
                             condition_cap=self.condition_cap)

    def out(self) -> dict:
        return {"n": self.n, "L": self.L, "refine": self.refine,
                "solver": self.solver, "tail_tol": self.tail_tol,
                "condition_cap": self.condition_cap}


_TOP_KEYS = ("command", "plus", "minus", "reflection_plus", "reflection_minus",
             "x_grid", "zeta_grid", "tolerance", "out", "format", "marchenko",
             "threads")


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs; the file form is documented in the
    README."""

    command: str
    plus: TripletSpec | None = None
    minus: TripletSpec | None = None
    reflection_plus: ReflectionSpec | None = None
    reflection_minus: ReflectionSpec | None = None
    x_grid: GridSpec = dc_field(default_factory=lambda: GridSpec(-5.0, 5.0, 201))
    zeta_grid: GridSpec = dc_field(default_factory=lambda: GridSpec(0.2, 3.0, 15))
    tolerance: float = 1e-8
    out: str = "."
    format: str = "csv"
    marchenko: MarchenkoParams = dc_field(default_factory=MarchenkoParams)
    threads: int | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(
                f"key 'command': unknown command {self.command!r}", key="command")
        if self.format not in FORMATS:
            raise ConfigError(
                f"key 'format': expected csv or json, got {self.format!r}",
                key="format")
        if not self.tolerance > 0:
            raise ConfigError("key 'tolerance': must be positive", key="tolerance")
        if self.threads is not None and self.threads < 1:
            raise ConfigError("key 'threads': must be at least 1", key="threads")

    def effective_threads(self) -> int:
        if self.threads is not None:
            return self.threads
        env = os.environ.get("MARCHENKO_THREADS", "").strip()
        if env:
            try:
                n = int(env)
            except ValueError:
                raise ConfigError(
                    f"MARCHENKO_THREADS must be an integer, got {env!r}")
            if n < 1:
                raise ConfigError("MARCHENKO_THREADS must be at least 1")
            return n
        return 1

    def plus_triplet(self) -> MatrixTriplet:
        return (self.plus.resolve("plus") if self.plus is not None
                else MatrixTriplet.empty())

    def minus_triplet(self) -> MatrixTriplet:
        return (self.minus.resolve("minus") if self.minus is not None
                else MatrixTriplet.empty())

    def dataset(self) -> ScatteringDataset:
        return ScatteringDataset(
            reflection_plus=(self.reflection_plus.resolve()
                             if self.reflection_plus is not None else None),
            reflection_minus=(self.reflection_minus.resolve()
                              if self.reflection_minus is not None else None),
            plus_triplet=self.plus_triplet(),
            minus_triplet=self.minus_triplet())


def parse_config_data(data: dict) -> RunConfig:
    """Build a validated RunConfig from already-decoded JSON data."""
    data = _need_mapping(data, "")
    _reject_unknown(data, _TOP_KEYS, "")
    if "command" not in data:
        raise _fail("command", "missing")
    kw: dict = {"command": data["command"]}
    if "plus" in data:
        kw["plus"] = TripletSpec.parse(data["plus"], "plus")
    if "minus" in data:
        kw["minus"] = TripletSpec.parse(data["minus"], "minus")
    if "reflection_plus" in data:
        kw["reflection_plus"] = ReflectionSpec.parse(
            data["reflection_plus"], "reflection_plus")
    if "reflection_minus" in data:
        kw["reflection_minus"] = ReflectionSpec.parse(
            data["reflection_minus"], "reflection_minus")
    if "x_grid" in data:
        kw["x_grid"] = GridSpec.parse(data["x_grid"], "x_grid")
    if "zeta_grid" in data:
        kw["zeta_grid"] = GridSpec.parse(data["zeta_grid"], "zeta_grid")
    if "tolerance" in data:
        kw["tolerance"] = _number(data["tolerance"], "tolerance")
    if "out" in data:
        if not isinstance(data["out"], str):
            raise _fail("out", "expected a string path")
        kw["out"] = data["out"]
    if "format" in data:
        kw["format"] = data["format"]
    if "marchenko" in data:
        kw["marchenko"] = MarchenkoParams.parse(data["marchenko"], "marchenko")
    if "threads" in data:
        kw["threads"] = _integer(data["threads"], "threads")
    return RunConfig(**kw)


def parse_config(path: str) -> RunConfig:
    """Read and validate a configuration file."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config_data(data)


def config_data(config: RunConfig) -> dict:
    """The canonical plain-data form of a configuration."""
    data: dict = {"command": config.command}
    if config.plus is not None:
        data["plus"] = config.plus.out()
    if config.minus is not None:
        data["minus"] = config.minus.out()
    if config.reflection_plus is not None:
        data["reflection_plus"] = config.reflection_plus.out()
    if config.reflection_minus is not None:
        data["reflection_minus"] = config.reflection_minus.out()
    data["x_grid"] = config.x_grid.out()
    data["zeta_grid"] = config.zeta_grid.out()
    data["tolerance"] = config.tolerance
    data["out"] = config.out
    data["format"] = config.format
    data["marchenko"] = config.marchenko.out()
    if config.threads is not None:
        data["threads"] = config.threads
    return data


def format_number(v) -> str:
    """Fixed 17-significant-digit rendering shared by every output path."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    f = float(v)
    if f != f or f in (float("inf"), float("-inf")):
        raise ValueError(f"cannot serialize non-finite number {f}")
    return f"{f:.17g}"


def dump_json(obj, indent: int = 0) -> str:
    """Deterministic JSON with fixed float formatting; insertion order kept."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [f"{inner}{json.dumps(str(k))}: {dump_json(v, indent + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple)) for v in obj)
        if flat:
            return "[" + ", ".join(dump_json(v, 0) for v in obj) + "]"
        parts = [f"{inner}{dump_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    return format_number(obj)


def serialize_config(config: RunConfig) -> str:
    """Canonical text form; ``parse_config`` of it reproduces ``config``."""
    return dump_json(config_data(config)) + "\n"
