"""Scenario files for the command line.

Flat ``key = value`` text, one entry per line, ``#`` starts a comment::

    probe = fock 1
    ancilla = fock 1
    prior_v = sweep 0.05 10 60 log
    outcome = 0 0
    tol = 1e-09
    seed = 0
    n_cut = 40

``probe`` and ``ancilla`` take ``fock N``, ``lossy L``, ``gaussian A`` or
``gkp``; the ancilla defaults to the probe.  ``prior_v`` is a single value
or ``sweep MIN MAX POINTS log|linear``.  ``outcome`` is ``Y_X Y_P``,
``window R [R ...]`` or ``bayes``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

import numpy as np

from .filters import (
    CrossFockFilter,
    Filter,
    FockFilter,
    GaussianFilter,
    GkpFilter,
    heterodyne_filter,
    mixture_filter,
)
from .fock import DEFAULT_NCUT, fock_dm, lossy_single_photon, pure_dm, squeezed_vacuum
from .gaussian import pure_gaussian_cov

FAMILIES = ("fock", "lossy", "gaussian", "gkp")


@dataclass(frozen=True)
class StateSpec:
    family: str
    param: float | int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown state family {self.family!r}")
        if self.family == "gkp":
            if self.param is not None:
                raise ValueError("gkp takes no parameter")
        elif self.param is None:
            raise ValueError(f"{self.family} needs a parameter")
        if self.family == "fock" and (int(self.param) != self.param or self.param < 0):
            raise ValueError("fock photon number must be a non-negative integer")
        if self.family == "lossy" and not 0 <= self.param <= 1:
            raise ValueError("loss rate must lie in [0, 1]")
        if self.family == "gaussian" and not self.param > 0:
            raise ValueError("gaussian squeezing parameter must be positive")

    @classmethod
    def parse(cls, text: str) -> "StateSpec":
        parts = text.split()
        if not parts:
            raise ValueError("empty state specification")
        fam = parts[0].lower()
        if len(parts) > 2:
            raise ValueError(f"bad state specification {text!r}")
        if fam == "gkp":
            return cls(fam, None) if len(parts) == 1 else cls(fam, float(parts[1]))
        if len(parts) != 2:
            raise ValueError(f"{fam} needs exactly one parameter")
        return cls(fam, int(parts[1]) if fam == "fock" else float(parts[1]))

    def dump(self) -> str:
        return self.family if self.param is None else f"{self.family} {self.param!r}"

    def density(self, n_cut: int) -> np.ndarray:
        if self.family == "fock":
            return fock_dm(self.param, max(n_cut, self.param))
        if self.family == "lossy":
            return lossy_single_photon(self.param)
        if self.family == "gaussian":
            return pure_dm(squeezed_vacuum(self.param, n_cut))
        raise ValueError("the ideal grid state has no density matrix")


@dataclass(frozen=True)
class Sweep:
    lo: float
    hi: float
    points: int
    scale: str = "log"

    def __post_init__(self):
        if not (0 < self.lo <= self.hi):
            raise ValueError("sweep bounds must satisfy 0 < min <= max")
        if self.points < 1:
            raise ValueError("sweep needs at least one point")
        if self.scale not in ("log", "linear"):
            raise ValueError("sweep scale must be log or linear")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)

    def dump(self) -> str:
        return f"sweep {self.lo!r} {self.hi!r} {self.points} {self.scale}"


DEFAULT_SWEEP = Sweep(0.05, 10.0, 60, "log")


@dataclass(frozen=True)
class Outcome:
    kind: str  # "point", "window" or "bayes"
    values: tuple = ()

    @classmethod
    def parse(cls, text: str) -> "Outcome":
        parts = text.split()
        if parts == ["bayes"]:
            return cls("bayes")
        if parts and parts[0] == "window":
            radii = tuple(float(r) for r in parts[1:])
            if not radii or any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
                raise ValueError("window radii must be positive and increasing")
            return cls("window", radii)
        if len(parts) == 2:
            return cls("point", (float(parts[0]), float(parts[1])))
        raise ValueError(f"bad outcome {text!r}")

    def dump(self) -> str:
        if self.kind == "bayes":
            return "bayes"
        body = " ".join(repr(float(x)) for x in self.values)
        return f"window {body}" if self.kind == "window" else body


@dataclass(frozen=True)
class ScenarioConfig:
    probe: StateSpec = StateSpec("fock", 1)
    ancilla: StateSpec | None = None
    prior_v: float | Sweep = DEFAULT_SWEEP
    outcome: Outcome = field(default_factory=lambda: Outcome("point", (0.0, 0.0)))
    tol: float = 1e-9
    seed: int = 0
    n_cut: int = DEFAULT_NCUT

    def __post_init__(self):
        if isinstance(self.prior_v, (int, float)) and not self.prior_v > 0:
            raise ValueError("prior_v must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.n_cut < 1:
            raise ValueError("n_cut must be >= 1")

    @property
    def ancilla_spec(self) -> StateSpec:
        return self.ancilla or self.probe

    def v_values(self) -> np.ndarray:
        if isinstance(self.prior_v, Sweep):
            return self.prior_v.values()
        return np.array([float(self.prior_v)])

    def with_overrides(self, **kw) -> "ScenarioConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def dumps(self) -> str:
        lines = []
        for f in fields(self):
            val = getattr(self, f.name)
            if val is None:
                continue
            if hasattr(val, "dump"):
                text = val.dump()
            elif isinstance(val, float):
                text = repr(val)
            else:
                text = str(val)
            lines.append(f"{f.name} = {text}")
        return "\n".join(lines) + "\n"


def _parse_prior(text: str) -> float | Sweep:
    parts = text.split()
    if parts[0] == "sweep":
        if len(parts) not in (4, 5):
            raise ValueError("sweep needs MIN MAX POINTS [log|linear]")
        return Sweep(float(parts[1]), float(parts[2]), int(parts[3]), *(parts[4:] or ["log"]))
    if len(parts) != 1:
        raise ValueError(f"bad prior_v {text!r}")
    return float(parts[0])


_PARSERS = {
    "probe": StateSpec.parse,
    "ancilla": StateSpec.parse,
    "prior_v": _parse_prior,
    "outcome": Outcome.parse,
    "tol": float,
    "seed": int,
    "n_cut": int,
}


def loads(text: str) -> ScenarioConfig:
    kw = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in _PARSERS:
            raise ValueError(f"line {lineno}: expected one of {sorted(_PARSERS)} as 'key = value'")
        if key in kw:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        try:
            kw[key] = _PARSERS[key](value.strip())
        except (ValueError, IndexError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return ScenarioConfig(**kw)


def load(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def build_filter(probe: StateSpec, ancilla: StateSpec | None = None, n_cut: int = DEFAULT_NCUT) -> Filter:
    """Heterodyne kernel for a probe/ancilla pair.

    Fock-diagonal pairs use closed forms, two squeezed vacua combine into a
    Gaussian kernel, and mixed Gaussian/Fock pairs go through the truncated
    trace formula.  Grid states pair only with grid states.
    """
    ancilla = ancilla or probe
    fams = {probe.family, ancilla.family}
    if "gkp" in fams:
        if fams != {"gkp"}:
            raise ValueError("a grid-state probe needs a grid-state ancilla")
        return GkpFilter()
    if probe.family == ancilla.family == "fock":
        m, n = probe.param, ancilla.param
        return FockFilter(m) if m == n else CrossFockFilter(m, n)
    if probe.family == ancilla.family == "gaussian":
        return GaussianFilter(pure_gaussian_cov(probe.param) + pure_gaussian_cov(ancilla.param))
    if "gaussian" not in fams:
        return mixture_filter(probe.density(n_cut), ancilla.density(n_cut))
    return heterodyne_filter(probe.density(n_cut), ancilla.density(n_cut))
