"""Run configuration for orlicz-spectra.

``Config`` overlays a JSON or TOML file and dotted command-line overrides on
the defaults; ``RunConfig`` is the validated, immutable view the runner uses.
"""

import copy
import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import toml

from orlicz_spectra.errors import ConfigError, InputError
from orlicz_spectra.mesh import Mesh
from orlicz_spectra.solver import SolverConfig
from orlicz_spectra.young import GrowthFunction, YoungFunction, growth_from_config, young_from_config

logger = logging.getLogger(__name__)

TASKS = ("solve", "sweep", "validate")


@dataclass(frozen=True)
class DomainConfig:
    a: float = -1.0
    b: float = 1.0


@dataclass(frozen=True)
class YoungConfig:
    kind: str = "power"
    p: float | None = 2.0
    table: tuple[tuple[float, float], ...] | None = None

    def build(self) -> YoungFunction:
        return young_from_config(asdict(self))


@dataclass(frozen=True)
class GrowthConfig:
    kind: str = "young"
    q: float | None = None
    a1: float = 0.0
    a2: float = 1.0
    a3: float = 1.0

    def build(self, young: YoungFunction) -> GrowthFunction:
        return growth_from_config(asdict(self), young)


@dataclass(frozen=True)
class MeshConfig:
    k: int = 15
    grading: float = 2.0
    exterior_radius: float | None = None
    quad_order: int = 5


@dataclass(frozen=True)
class SweepConfig:
    """Sweep axes; an empty axis falls back to the single configured value."""

    k: tuple[int, ...] = ()
    s: tuple[float, ...] = ()


@dataclass(frozen=True)
class ValidationConfig:
    trials: int = 1000
    appendix_trials: int | None = None
    oracle_levels: int = 3

    @property
    def appendix_count(self) -> int:
        return self.appendix_trials if self.appendix_trials is not None else min(self.trials, 100)


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration."""

    domain: DomainConfig = field(default_factory=DomainConfig)
    s: float = 0.5
    young: YoungConfig = field(default_factory=YoungConfig)
    growth: GrowthConfig = field(default_factory=GrowthConfig)
    mesh: MeshConfig = field(default_factory=MeshConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    task: str = "solve"
    levels: tuple[int, ...] = (1,)
    output: str | None = None
    sweep: SweepConfig = field(default_factory=SweepConfig)
    validation: ValidationConfig = field(default_factory=ValidationConfig)

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> "RunConfig":
        """Validate a plain mapping, raising ConfigError with the offending dotted key."""
        reader = _Reader(overlay(cls().to_dict(), data))
        domain = DomainConfig(a=reader.number("domain.a"), b=reader.number("domain.b"))
        young = YoungConfig(
            kind=reader.choice("young.kind", ("power", "exp", "exp_dual", "custom")),
            p=reader.number("young.p", optional=True),
            table=reader.table("young.table"),
        )
        growth = GrowthConfig(
            kind=reader.choice("growth.kind", ("young", "power")),
            q=reader.number("growth.q", optional=True),
            a1=reader.number("growth.a1"),
            a2=reader.number("growth.a2"),
            a3=reader.number("growth.a3"),
        )
        mesh = MeshConfig(
            k=reader.integer("mesh.k", minimum=1),
            grading=reader.number("mesh.grading"),
            exterior_radius=reader.number("mesh.exterior_radius", optional=True),
            quad_order=reader.integer("mesh.quad_order", minimum=1),
        )
        solver_values: dict[str, Any] = {}
        for spec in fields(SolverConfig):
            key = f"solver.{spec.name}"
            if isinstance(spec.default, float):
                solver_values[spec.name] = reader.number(key)
            else:
                solver_values[spec.name] = reader.integer(key, optional=spec.default is None)
        config = cls(
            domain=domain,
            s=reader.number("s"),
            young=young,
            growth=growth,
            mesh=mesh,
            solver=reader.build("solver", lambda: SolverConfig(**solver_values)),
            task=reader.choice("task", TASKS),
            levels=tuple(reader.integers("levels", minimum=1)),
            output=reader.string("output", optional=True),
            sweep=SweepConfig(
                k=tuple(reader.integers("sweep.k", minimum=1)),
                s=tuple(reader.numbers("sweep.s")),
            ),
            validation=ValidationConfig(
                trials=reader.integer("validation.trials", minimum=0),
                appendix_trials=reader.integer("validation.appendix_trials", minimum=0, optional=True),
                oracle_levels=reader.integer("validation.oracle_levels", minimum=0),
            ),
        )
        if not config.levels:
            raise ConfigError("at least one level is required", key="levels")
        config.validate()
        return config

    def validate(self) -> None:
        """Construct every numerical object once so bad values fail before any computation."""
        if not self.domain.a < self.domain.b:
            raise ConfigError(f"domain needs a < b, got ({self.domain.a}, {self.domain.b})", key="domain")
        for key, s in [("s", self.s)] + [("sweep.s", s) for s in self.sweep.s]:
            if not 0.0 < s < 1.0:
                raise ConfigError(f"fractional order must lie in (0, 1), got {s}", key=key)
        young = _guard("young", self.young.build)
        _guard("growth", lambda: self.growth.build(young))
        for s in self.sweep.s or (self.s,):
            for k in self.sweep.k or (self.mesh.k,):
                _guard("mesh", lambda k=k, s=s: Mesh(self.domain.a, self.domain.b, k, s))
        if not self.mesh.grading >= 1.0:
            raise ConfigError(f"grading must be at least 1, got {self.mesh.grading}", key="mesh.grading")
        radius = self.mesh.exterior_radius
        if radius is not None and not radius > 0.0:
            raise ConfigError(f"exterior radius must be positive, got {radius}", key="mesh.exterior_radius")

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["levels"] = list(self.levels)
        data["sweep"] = {"k": list(self.sweep.k), "s": list(self.sweep.s)}
        if self.young.table is not None:
            data["young"]["table"] = [list(row) for row in self.young.table]
        return data


def overlay(base: dict[str, Any], values: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    """Deep-merge values into base in place; unknown keys are rejected."""
    for key, value in values.items():
        dotted = f"{prefix}{key}"
        if key not in base:
            raise ConfigError("unknown key", key=dotted)
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError("expected a section", key=dotted)
            overlay(base[key], value, f"{dotted}.")
        else:
            base[key] = value
    return base


def _guard(key: str, build: Any) -> Any:
    try:
        return build()
    except InputError as exc:
        raise ConfigError(str(exc), key=key) from exc


class _Reader:
    """Typed access to a nested mapping by dotted key."""

    def __init__(self, data: dict[str, Any]) -> None:
        self.data = data

    def raw(self, key: str) -> Any:
        value: Any = self.data
        for part in key.split("."):
            if not isinstance(value, dict) or part not in value:
                raise ConfigError("missing value", key=key)
            value = value[part]
        return value

    def number(self, key: str, optional: bool = False) -> Any:
        value = self.raw(key)
        if value is None and optional:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(f"expected a finite number, got {value!r}", key=key)
        return float(value)

    def integer(self, key: str, minimum: int | None = None, optional: bool = False) -> Any:
        value = self.raw(key)
        if value is None and optional:
            return None
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", key=key)
        if minimum is not None and value < minimum:
            raise ConfigError(f"must be at least {minimum}, got {value}", key=key)
        return value

    def _items(self, key: str) -> list[Any]:
        value = self.raw(key)
        if not isinstance(value, list):
            raise ConfigError(f"expected a list, got {value!r}", key=key)
        return value

    def integers(self, key: str, minimum: int | None = None) -> list[int]:
        out = []
        for item in self._items(key):
            if isinstance(item, bool) or not isinstance(item, int) or (minimum is not None and item < minimum):
                raise ConfigError(f"expected integers >= {minimum}, got {item!r}", key=key)
            out.append(item)
        return out

    def numbers(self, key: str) -> list[float]:
        out = []
        for item in self._items(key):
            if isinstance(item, bool) or not isinstance(item, (int, float)) or not math.isfinite(item):
                raise ConfigError(f"expected finite numbers, got {item!r}", key=key)
            out.append(float(item))
        return out

    def string(self, key: str, optional: bool = False) -> Any:
        value = self.raw(key)
        if value is None and optional:
            return None
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {value!r}", key=key)
        return value

    def choice(self, key: str, options: tuple[str, ...]) -> str:
        value = self.string(key)
        if value not in options:
            raise ConfigError(f"expected one of {', '.join(options)}, got {value!r}", key=key)
        return str(value)

    def table(self, key: str) -> tuple[tuple[float, float], ...] | None:
        value = self.raw(key)
        if value is None:
            return None
        rows = []
        for row in self._items(key):
            if not isinstance(row, list) or len(row) != 2:
                raise ConfigError(f"table rows must be [t, m(t)] pairs, got {row!r}", key=key)
            rows.append((self._finite(key, row[0]), self._finite(key, row[1])))
        return tuple(rows)

    @staticmethod
    def _finite(key: str, value: Any) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(f"expected a finite number, got {value!r}", key=key)
        return float(value)

    def build(self, key: str, factory: Any) -> Any:
        return _guard(key, factory)


def parse_override(text: str) -> Any:
    """Interpret a command-line value as JSON, falling back to the raw string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


class Config:
    """Application configuration."""

    def __init__(self, config_file: Path | None = None) -> None:
        """Initialize configuration.

        Args:
            config_file: Optional JSON or TOML file overlaid on the defaults

        Raises:
            ConfigError: If the file is missing, unparsable or has unknown keys
        """
        self.config_file = config_file
        self._text: str | None = None
        self._config: dict[str, Any] = self._load_config()

    def _load_config(self) -> dict[str, Any]:
        """Load configuration from file or defaults."""
        config = self._get_defaults()
        if self.config_file is None:
            return config
        path = self.config_file
        try:
            self._text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc.strerror}", path=path) from exc
        try:
            if path.suffix == ".toml":
                file_config = toml.loads(self._text)
            else:
                file_config = json.loads(self._text)
        except json.JSONDecodeError as exc:
            raise ConfigError(exc.msg, path=path, line=exc.lineno) from exc
        except toml.TomlDecodeError as exc:
            raise ConfigError(exc.msg, path=path, line=exc.lineno) from exc
        if not isinstance(file_config, dict):
            raise ConfigError("top level must be an object", path=path, line=1)
        try:
            overlay(config, file_config)
        except ConfigError as exc:
            raise self.anchor(exc) from exc
        logger.debug(f"Loaded configuration from {path}")
        return config

    @staticmethod
    def _get_defaults() -> dict[str, Any]:
        """Get default configuration values."""
        return RunConfig().to_dict()

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value using dot notation.

        Args:
            key: Configuration key (e.g., "mesh.k")
            default: Default value if key not found

        Returns:
            Configuration value
        """
        value: Any = self._config
        for k in key.split("."):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default
        return value

    def set(self, key: str, value: Any) -> None:
        """Override one existing leaf by dotted key."""
        *parents, leaf = key.split(".")
        section: Any = self._config
        for k in parents:
            section = section.get(k) if isinstance(section, dict) else None
        if not isinstance(section, dict) or leaf not in section or isinstance(section[leaf], dict):
            raise ConfigError("unknown key", key=key)
        section[leaf] = value

    def line_of(self, key: str) -> int | None:
        """Best-effort 1-based line of a dotted key in the config file."""
        if self._text is None:
            return None
        lines = self._text.splitlines()
        start = 0
        for part in key.split("."):
            patterns = (f'"{part}"', f"[{part}]", f"{part} =", f"{part}=")
            for n in range(start, len(lines)):
                if any(p in lines[n] for p in patterns):
                    start = n
                    break
            else:
                return None
        return start + 1

    def anchor(self, error: ConfigError) -> ConfigError:
        """Attach the config file and line of the error's key."""
        if self.config_file is None or error.path is not None:
            return error
        line = self.line_of(error.key) if error.key else None
        return ConfigError(error.message, key=error.key, path=self.config_file, line=line)

    def run_config(self) -> RunConfig:
        """Validate the merged values.

        Raises:
            ConfigError: Anchored to the file line of the offending key when known
        """
        try:
            return RunConfig.from_mapping(copy.deepcopy(self._config))
        except ConfigError as exc:
            raise self.anchor(exc) from exc
