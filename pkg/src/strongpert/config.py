"""Run configuration: flat ``section.key = value`` text files.

Example::

    # two-level system with constant coupling
    model.type = two_level
    two_level.E1 = 0.1
    two_level.E2 = 0.2
    two_level.V12 = 1
    grid.t_max = 10

Lines starting with ``#`` and trailing ``# ...`` are comments. Lists are
comma-separated. See ``KEYS`` for every accepted key and its default.
"""

from dataclasses import dataclass, field

from .errors import ConfigError, DegeneracyError, TruncationError
from .models import (
    TwoLevelParams,
    TwoWaveParams,
    two_level_scenario,
    two_wave_series_scenario,
)

MODELS = ("two_level", "two_wave")
MODES = ("raw", "resummed")
FORMATS = ("csv", "json")
MIN_POINTS = 100
MAX_ORDER = 2

TWO_LEVEL_KEYS = ("E1", "E2", "V12")
TWO_WAVE_KEYS = ("mass", "p0", "V1", "V2", "k1", "k2", "w1", "w2")

# key -> default (None: required or model-specific)
KEYS = {
    "model.type": None,
    "model.hbar": 1.0,
    **{f"two_level.{k}": None for k in TWO_LEVEL_KEYS},
    "two_level.initial": "v1",
    **{f"two_wave.{k}": None for k in TWO_WAVE_KEYS},
    "two_wave.trunc": None,
    "grid.t0": 0.0,
    "grid.t_max": None,
    "grid.points": 2001,
    "series.orders": MAX_ORDER,
    "series.modes": MODES,
    "secular.window": None,
    "oracle.enabled": True,
    "oracle.substeps": 4,
    "output.dir": "out",
    "output.formats": FORMATS,
}


@dataclass(frozen=True)
class RunConfig:
    model: str
    params: dict
    t_max: float
    hbar: float = 1.0
    t0: float = 0.0
    points: int = 2001
    orders: int = MAX_ORDER
    modes: tuple = MODES
    oracle: bool = True
    substeps: int = 4
    out_dir: str = "out"
    formats: tuple = FORMATS
    window: tuple = None
    initial: str = "v1"
    lines: dict = field(default_factory=dict, compare=False, repr=False)

    def model_params(self):
        if self.model == "two_level":
            return TwoLevelParams(hbar=self.hbar, **self.params)
        return TwoWaveParams(hbar=self.hbar, **self.params)

    def scenario(self):
        p = self.model_params()
        if self.model == "two_level":
            return two_level_scenario(p, self.t_max, self.points, self.t0, self.initial)
        return two_wave_series_scenario(p, self.t_max, self.points, self.t0)


def _float(key, raw, line):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"expected a number, got {raw!r}", key, line) from None


def _int(key, raw, line):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"expected an integer, got {raw!r}", key, line) from None


def _complex(key, raw, line):
    try:
        return complex(raw.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"expected a complex number, got {raw!r}", key, line) from None


def _bool(key, raw, line):
    v = raw.strip().lower()
    if v in ("true", "yes", "on", "1"):
        return True
    if v in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"expected true/false, got {raw!r}", key, line)


def _list(raw):
    return tuple(s.strip() for s in raw.split(",") if s.strip())


def _read_pairs(text):
    entries = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", line=lineno)
        key, value = (s.strip() for s in body.split("=", 1))
        if key not in KEYS:
            raise ConfigError("unknown key", key, lineno)
        if key in entries:
            raise ConfigError(f"duplicate key (first set on line {entries[key][1]})", key, lineno)
        if not value:
            raise ConfigError("empty value", key, lineno)
        entries[key] = (value, lineno)
    return entries


def parse_config(text):
    """Parse and validate configuration text into a :class:`RunConfig`."""
    entries = _read_pairs(text)

    def line(key):
        return entries[key][1] if key in entries else None

    def get(key, conv):
        if key in entries:
            raw, ln = entries[key]
            return conv(key, raw, ln)
        return KEYS[key]

    def require(key, conv):
        if key not in entries:
            raise ConfigError("missing required key", key)
        return get(key, conv)

    model = require("model.type", lambda k, r, l: r)
    if model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {model!r}", "model.type", line("model.type"))
    hbar = get("model.hbar", _float)
    if hbar <= 0:
        raise ConfigError("hbar must be positive", "model.hbar", line("model.hbar"))

    other = "two_wave" if model == "two_level" else "two_level"
    for key in entries:
        if key.startswith(other + "."):
            raise ConfigError(f"key does not apply to model {model!r}", key, line(key))

    initial = "v1"
    if model == "two_level":
        params = {
            "E1": require("two_level.E1", _float),
            "E2": require("two_level.E2", _float),
            "V12": require("two_level.V12", _complex),
        }
        initial = get("two_level.initial", lambda k, r, l: r)
        if initial not in ("v1", "v2", "e1", "e2"):
            raise ConfigError(
                "initial state must be v1, v2, e1 or e2", "two_level.initial", line("two_level.initial")
            )
    else:
        params = {k: require(f"two_wave.{k}", _float) for k in TWO_WAVE_KEYS}
        trunc = get("two_wave.trunc", _int)
        if trunc is not None:
            params["trunc"] = trunc

    t0 = get("grid.t0", _float)
    t_max = require("grid.t_max", _float)
    if not t_max > t0:
        raise ConfigError(f"grid.t_max ({t_max}) must exceed grid.t0 ({t0})", "grid.t_max", line("grid.t_max"))
    points = get("grid.points", _int)
    if points < MIN_POINTS:
        raise ConfigError(f"must be at least {MIN_POINTS}, got {points}", "grid.points", line("grid.points"))

    orders = get("series.orders", _int)
    if not 0 <= orders <= MAX_ORDER:
        raise ConfigError(f"must be between 0 and {MAX_ORDER}, got {orders}", "series.orders", line("series.orders"))
    modes = get("series.modes", lambda k, r, l: _list(r))
    bad = [m for m in modes if m not in MODES]
    if bad or not modes or len(set(modes)) != len(modes):
        raise ConfigError(f"modes must be distinct values from {MODES}", "series.modes", line("series.modes"))

    window = None
    if "secular.window" in entries:
        raw, ln = entries["secular.window"]
        parts = _list(raw)
        if len(parts) != 2:
            raise ConfigError("expected 'lo, hi'", "secular.window", ln)
        window = tuple(_float("secular.window", p, ln) for p in parts)
        if not window[0] < window[1]:
            raise ConfigError("window must satisfy lo < hi", "secular.window", ln)

    oracle = get("oracle.enabled", _bool)
    substeps = get("oracle.substeps", _int)
    if substeps < 1:
        raise ConfigError("must be >= 1", "oracle.substeps", line("oracle.substeps"))
    out_dir = get("output.dir", lambda k, r, l: r)
    formats = get("output.formats", lambda k, r, l: _list(r))
    if any(f not in FORMATS for f in formats):
        raise ConfigError(f"formats must be drawn from {FORMATS}", "output.formats", line("output.formats"))

    cfg = RunConfig(
        model=model,
        params=params,
        t_max=t_max,
        hbar=hbar,
        t0=t0,
        points=points,
        orders=orders,
        modes=tuple(modes),
        oracle=oracle,
        substeps=substeps,
        out_dir=out_dir,
        formats=tuple(formats),
        window=window,
        initial=initial,
        lines={k: v[1] for k, v in entries.items()},
    )
    try:
        cfg.model_params()
    except TruncationError as exc:
        key = "two_wave.trunc" if "two_wave.trunc" in entries else "two_wave.V1"
        raise ConfigError(str(exc), key, line(key)) from None
    except DegeneracyError as exc:
        raise ConfigError(str(exc), "two_level.V12", line("two_level.V12")) from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, complex):
        return repr(v).strip("()")
    if isinstance(v, (tuple, list)):
        return ", ".join(_fmt(x) for x in v)
    return repr(v) if isinstance(v, float) else str(v)


def serialize_config(cfg):
    """Inverse of :func:`parse_config`; every field is written explicitly."""
    out = [f"model.type = {cfg.model}", f"model.hbar = {_fmt(cfg.hbar)}"]
    for k, v in cfg.params.items():
        out.append(f"{cfg.model}.{k} = {_fmt(v)}")
    if cfg.model == "two_level":
        out.append(f"two_level.initial = {cfg.initial}")
    out += [
        f"grid.t0 = {_fmt(cfg.t0)}",
        f"grid.t_max = {_fmt(cfg.t_max)}",
        f"grid.points = {cfg.points}",
        f"series.orders = {cfg.orders}",
        f"series.modes = {_fmt(cfg.modes)}",
    ]
    if cfg.window is not None:
        out.append(f"secular.window = {_fmt(cfg.window)}")
    out += [
        f"oracle.enabled = {_fmt(cfg.oracle)}",
        f"oracle.substeps = {cfg.substeps}",
        f"output.dir = {cfg.out_dir}",
        f"output.formats = {_fmt(cfg.formats)}",
    ]
    return "\n".join(out) + "\n"


def config_as_dict(cfg):
    d = {
        "model": cfg.model,
        "hbar": cfg.hbar,
        "params": {k: (repr(v).strip("()") if isinstance(v, complex) else v) for k, v in cfg.params.items()},
        "grid": {"t0": cfg.t0, "t_max": cfg.t_max, "points": cfg.points},
        "orders": cfg.orders,
        "modes": list(cfg.modes),
        "oracle": {"enabled": cfg.oracle, "substeps": cfg.substeps},
        "window": list(cfg.window) if cfg.window else None,
        "output": {"dir": cfg.out_dir, "formats": list(cfg.formats)},
    }
    if cfg.model == "two_level":
        d["initial"] = cfg.initial
    return d
