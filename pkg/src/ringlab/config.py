"""INI-style experiment configuration.

Sections (all keys lower case, arrays as comma lists)::

    [simulation]   alpha, eps_list, n_side, delta_exponent, dt (number or auto),
                   dt_safety, scheme, t_end, tail_radius, diag_stride
    [ring <name>]  intensity, center, patch_radius (optional, default eps)
    [reduced]      dt, scheme, t_end (default: simulation t_end)
    [leapfrog]     a1, a2, alpha, c_e | energy, k, rho, steps_per_period
    [portrait]     levels | levels_cstar, samples
    [period]       levels | levels_cstar

Ring sections are read in file order.  Every section is optional in the
file; a subcommand asks for the ones it needs.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from .blobs import DEFAULT_DELTA_EXPONENT, RingSpec, validate_rings
from .errors import ConfigError
from .leapfrog import TwoRingParams, c_e_from_energy

SCHEMES = ("euler", "rk4")
REDUCED_SCHEMES = ("rk4", "midpoint")


@dataclass(frozen=True)
class SimulationConfig:
    """Blob-simulation and sweep settings; ``dt = None`` means automatic."""

    rings: tuple[RingSpec, ...]
    eps_list: tuple[float, ...]
    alpha: float
    n_side: int
    t_end: float
    delta_exponent: float = DEFAULT_DELTA_EXPONENT
    dt: float | None = None
    dt_safety: float = 0.2
    scheme: str = "rk4"
    tail_radius: float = 0.1
    diag_stride: int = 10
    reduced_dt: float = 1e-3
    reduced_scheme: str = "rk4"

    def __post_init__(self) -> None:
        if not self.rings:
            raise ConfigError("at least one [ring ...] section is required")
        if not self.eps_list:
            raise ConfigError("eps_list must not be empty")
        for e in self.eps_list:
            if not 0 < e < 1:
                raise ConfigError(f"every eps must lie in (0, 1), got {e!r}")
        if any(b >= a for a, b in zip(self.eps_list, self.eps_list[1:])):
            raise ConfigError("eps_list must be strictly decreasing")
        _positive("alpha", self.alpha)
        _positive("t_end", self.t_end)
        _positive("tail_radius", self.tail_radius)
        _positive("dt_safety", self.dt_safety)
        _positive("reduced_dt", self.reduced_dt)
        if self.dt is not None:
            _positive("dt", self.dt)
        if self.n_side < 2:
            raise ConfigError(f"n_side must be >= 2, got {self.n_side!r}")
        if self.diag_stride < 1:
            raise ConfigError(f"diag_stride must be >= 1, got {self.diag_stride!r}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.reduced_scheme not in REDUCED_SCHEMES:
            raise ConfigError(f"reduced scheme must be one of {REDUCED_SCHEMES}, got {self.reduced_scheme!r}")
        # initial data must be admissible for every eps of the sweep
        for e in self.eps_list:
            validate_rings(self.rings, e, self.alpha * abs(math.log(e)))


@dataclass(frozen=True)
class LeapfrogConfig:
    """Two-ring settings.  Without ``alpha`` the threshold search picks it from ``rho`` and ``energy``."""

    a1: float
    a2: float
    alpha: float | None = None
    c_e: float | None = None
    energy: float | None = None
    k: int = 3
    rho: float | None = None
    steps_per_period: int = 2000

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k!r}")
        if self.steps_per_period < 8:
            raise ConfigError("steps_per_period must be >= 8")
        if self.alpha is None:
            if self.rho is None or self.energy is None:
                raise ConfigError("[leapfrog] needs alpha, or rho and energy for the threshold search")
        elif self.c_e is None and self.energy is None:
            raise ConfigError("[leapfrog] needs c_e or energy")
        if self.c_e is not None and self.energy is not None:
            raise ConfigError("[leapfrog] give either c_e or energy, not both")
        if self.c_e is not None:
            _positive("c_e", self.c_e)
        if self.alpha is not None:
            _positive("alpha", self.alpha)
        if self.rho is not None:
            _positive("rho", self.rho)
        try:
            TwoRingParams(self.a1, self.a2, 1.0 if self.alpha is None else self.alpha)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def params(self, alpha: float | None = None) -> TwoRingParams:
        al = self.alpha if alpha is None else alpha
        if al is None:
            raise ConfigError("alpha is not set")
        return TwoRingParams(self.a1, self.a2, al)

    def level(self, params: TwoRingParams) -> float:
        if self.c_e is not None:
            return self.c_e
        assert self.energy is not None
        return c_e_from_energy(self.energy, params)


@dataclass(frozen=True)
class LevelsConfig:
    """Level list, either absolute ``C_E`` values or fractions of ``C*``."""

    levels: tuple[float, ...] = ()
    levels_cstar: tuple[float, ...] = ()
    samples: int = 200

    def __post_init__(self) -> None:
        if bool(self.levels) == bool(self.levels_cstar):
            raise ConfigError("give exactly one of levels / levels_cstar")
        for v in self.levels + self.levels_cstar:
            _positive("level", v)
        if self.samples < 4:
            raise ConfigError("samples must be >= 4")

    def resolve(self, params: TwoRingParams) -> list[float]:
        if self.levels:
            return list(self.levels)
        if not math.isfinite(params.cstar):
            raise ConfigError("levels_cstar needs a1 != a2 (C* is infinite)")
        return [f * params.cstar for f in self.levels_cstar]


@dataclass
class ExperimentFile:
    """Parsed configuration file; typed sections are built on demand."""

    path: Path
    parser: configparser.ConfigParser = field(repr=False)

    def has(self, section: str) -> bool:
        return self.parser.has_section(section)

    def rings(self) -> tuple[RingSpec, ...]:
        out = []
        for name in self.parser.sections():
            if name == "ring" or name.startswith("ring "):
                sec = self.parser[name]
                _only(sec, name, {"intensity", "center", "patch_radius"})
                pr = sec.get("patch_radius")
                try:
                    out.append(
                        RingSpec(
                            intensity=_float(sec, "intensity"),
                            center=_pair(sec, "center"),
                            patch_radius=None if pr is None else _num(pr, "patch_radius"),
                        )
                    )
                except ConfigError as exc:
                    raise ConfigError(f"[{name}]: {exc}") from exc
        return tuple(out)

    def simulation(self) -> SimulationConfig:
        sec = self._section("simulation")
        _only(
            sec,
            "simulation",
            {
                "alpha", "eps", "eps_list", "n_side", "delta_exponent", "dt", "dt_safety",
                "scheme", "t_end", "tail_radius", "diag_stride",
            },
        )
        if "eps_list" in sec and "eps" in sec:
            raise ConfigError("[simulation]: give eps or eps_list, not both")
        eps = _list(sec, "eps_list") if "eps_list" in sec else (_float(sec, "eps"),)
        dt_raw = sec.get("dt", "auto").strip().lower()
        red = self.parser["reduced"] if self.has("reduced") else {}
        if red:
            _only(red, "reduced", {"dt", "scheme", "t_end"})
        return SimulationConfig(
            rings=self.rings(),
            eps_list=tuple(eps),
            alpha=_float(sec, "alpha"),
            n_side=_int(sec, "n_side"),
            t_end=_float(sec, "t_end"),
            delta_exponent=_float(sec, "delta_exponent", DEFAULT_DELTA_EXPONENT),
            dt=None if dt_raw == "auto" else _num(dt_raw, "dt"),
            dt_safety=_float(sec, "dt_safety", 0.2),
            scheme=sec.get("scheme", "rk4").strip(),
            tail_radius=_float(sec, "tail_radius", 0.1),
            diag_stride=_int(sec, "diag_stride", 10),
            reduced_dt=_float(red, "dt", 1e-3) if red else 1e-3,
            reduced_scheme=red.get("scheme", "rk4").strip() if red else "rk4",
        )

    def reduced_horizon(self) -> float:
        if self.has("reduced") and "t_end" in self.parser["reduced"]:
            return _float(self.parser["reduced"], "t_end")
        return _float(self._section("simulation"), "t_end")

    def leapfrog(self) -> LeapfrogConfig:
        sec = self._section("leapfrog")
        _only(sec, "leapfrog", {"a1", "a2", "alpha", "c_e", "energy", "k", "rho", "steps_per_period"})
        return LeapfrogConfig(
            a1=_float(sec, "a1"),
            a2=_float(sec, "a2"),
            alpha=_opt(sec, "alpha"),
            c_e=_opt(sec, "c_e"),
            energy=_opt(sec, "energy"),
            k=_int(sec, "k", 3),
            rho=_opt(sec, "rho"),
            steps_per_period=_int(sec, "steps_per_period", 2000),
        )

    def levels(self, section: str) -> LevelsConfig:
        sec = self._section(section)
        _only(sec, section, {"levels", "levels_cstar", "samples"})
        return LevelsConfig(
            levels=tuple(_list(sec, "levels")) if "levels" in sec else (),
            levels_cstar=tuple(_list(sec, "levels_cstar")) if "levels_cstar" in sec else (),
            samples=_int(sec, "samples", 200),
        )

    def _section(self, name: str):
        if not self.has(name):
            raise ConfigError(f"{self.path}: missing [{name}] section")
        return self.parser[name]


def load_config(path: str | Path) -> ExperimentFile:
    """Parse ``path``; syntax errors and unreadable files become :class:`ConfigError`."""
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    try:
        with path.open(encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return ExperimentFile(path, parser)


# --------------------------------------------------------------------------
# value parsing


def _positive(name: str, v: float) -> None:
    if not (v > 0 and math.isfinite(v)):
        raise ConfigError(f"{name} must be positive and finite, got {v!r}")


def _only(sec, name: str, allowed: set[str]) -> None:
    extra = sorted(set(sec.keys()) - allowed)
    if extra:
        raise ConfigError(f"[{name}]: unknown key(s) {', '.join(extra)}")


def _num(text: str, key: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite, got {text!r}")
    return v


def _float(sec, key: str, default: float | None = None) -> float:
    if key not in sec:
        if default is None:
            raise ConfigError(f"missing key {key!r}")
        return default
    return _num(sec[key], key)


def _opt(sec, key: str) -> float | None:
    return _num(sec[key], key) if key in sec else None


def _int(sec, key: str, default: int | None = None) -> int:
    if key not in sec:
        if default is None:
            raise ConfigError(f"missing key {key!r}")
        return default
    try:
        return int(sec[key])
    except ValueError:
        raise ConfigError(f"{key}: not an integer: {sec[key]!r}") from None


def _list(sec, key: str) -> list[float]:
    if key not in sec:
        raise ConfigError(f"missing key {key!r}")
    items = [t.strip() for t in sec[key].split(",") if t.strip()]
    if not items:
        raise ConfigError(f"{key}: empty list")
    return [_num(t, key) for t in items]


def _pair(sec, key: str) -> tuple[float, float]:
    vals = _list(sec, key)
    if len(vals) != 2:
        raise ConfigError(f"{key}: expected two comma-separated numbers")
    return vals[0], vals[1]
