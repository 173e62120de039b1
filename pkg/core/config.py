import json
from dataclasses import dataclass, replace

from core.orthogonalizer_runner import ALGORITHMS, is_mixed
from data.matrix_generators import KNOB_NAMES, MatrixSpec, MatrixSpecError
from numerics.linalg import CHOLESKY_VARIANTS
from numerics.precision import PrecisionId, PrecisionOrderError, PrecisionPair, UnknownPrecisionError
from orthogonalization.intraorth import IntraorthId, UnknownIntraorthError

_TOP_LEVEL_KEYS = {"matrix", "algorithms", "ios", "mp_pair", "output_dir", "precision", "timing", "cholesky"}
_MATRIX_KEYS = {"class", "m", "p", "s", "knob_sweep", "seed"}

DEFAULT_OUTPUT_DIR = "results"


class ConfigError(ValueError):
    """Base class of every sweep configuration error."""


class MalformedConfigError(ConfigError):
    """Text is not JSON, or a key is missing or has the wrong type."""


class UnknownKeyError(ConfigError):
    pass


class UnknownAlgorithmError(ConfigError):
    pass


class UnknownMatrixClassError(ConfigError):
    pass


class UnknownIntraorthNameError(ConfigError):
    pass


class UnknownPrecisionNameError(ConfigError):
    pass


class UnknownCholeskyNameError(ConfigError):
    pass


class PrecisionPairOrderError(ConfigError):
    """The mp_pair lists a high precision coarser than its low precision."""


class DimensionError(ConfigError):
    """Matrix dimensions or conditioning knobs violate a generator's contract."""


@dataclass
class SweepConfig:
    """
    One validated experiment: a matrix family swept over its conditioning
    knobs, and the (algorithm, io) combinations to run at every point.

    Parameters:
    - matrix_class: str
    - m, p, s: int
    - knob_sweep: list of dict
        One knob assignment per sweep point.
    - seed: int
    - algorithms: list of str
    - ios: list of IntraorthId
    - mp_pair: tuple of PrecisionId or None
    - output_dir: str
    - precision: PrecisionId
        Working precision of the uniform algorithms.
    - timing: bool
        Write measured wall times to the CSV.
    - cholesky: str
        Cholesky variant, "nonstop" or "lapack".
    """

    matrix_class: str
    m: int
    p: int
    s: int
    knob_sweep: list
    seed: int
    algorithms: list
    ios: list
    mp_pair: tuple = None
    output_dir: str = DEFAULT_OUTPUT_DIR
    precision: PrecisionId = PrecisionId.DOUBLE
    timing: bool = False
    cholesky: str = "nonstop"

    def matrix_specs(self):
        """MatrixSpec of every sweep point, in config order."""
        return [
            MatrixSpec(self.matrix_class, self.m, self.p, self.s, dict(knobs), self.seed)
            for knobs in self.knob_sweep
        ]

    def with_overrides(self, output_dir=None, seed=None, timing=None):
        """Copy with command-line overrides applied (None keeps the config value)."""
        changes = {}
        if output_dir is not None:
            changes["output_dir"] = str(output_dir)
        if seed is not None:
            changes["seed"] = _require_seed(seed)
        if timing:
            changes["timing"] = True
        return replace(self, **changes)

    def to_dict(self):
        """JSON-ready echo in the input format."""
        data = {
            "matrix": {
                "class": self.matrix_class,
                "m": self.m,
                "p": self.p,
                "s": self.s,
                "knob_sweep": [dict(k) for k in self.knob_sweep],
                "seed": self.seed,
            },
            "algorithms": list(self.algorithms),
            "ios": [io.value for io in self.ios],
            "output_dir": self.output_dir,
            "precision": self.precision.value,
            "timing": self.timing,
            "cholesky": self.cholesky,
        }
        if self.mp_pair is not None:
            data["mp_pair"] = [str(x) for x in self.mp_pair]
        return data


def _require(mapping, key, kind, where):
    if key not in mapping:
        raise MalformedConfigError(f"Missing key '{key}' in {where}")
    value = mapping[key]
    # bool is an int subclass; never accept it as a count
    if isinstance(value, bool) and kind is not bool:
        raise MalformedConfigError(f"Key '{key}' in {where} must be {kind.__name__}, got a boolean")
    if not isinstance(value, kind):
        raise MalformedConfigError(f"Key '{key}' in {where} must be {kind.__name__}, got {type(value).__name__}")
    return value


def _reject_unknown(mapping, allowed, where):
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise UnknownKeyError(f"Unknown key(s) in {where}: {', '.join(unknown)} (allowed: {', '.join(sorted(allowed))})")


def _require_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise MalformedConfigError(f"Seed must be an unsigned 64-bit integer, got {seed!r}")
    return seed


def _parse_list(data, key):
    values = _require(data, key, list, "config")
    if not values:
        raise MalformedConfigError(f"'{key}' must be a non-empty list")
    return values


def _parse_precision(name):
    try:
        return PrecisionId.from_name(name)
    except UnknownPrecisionError as e:
        raise UnknownPrecisionNameError(str(e)) from None


def _parse_matrix(data):
    matrix = _require(data, "matrix", dict, "config")
    _reject_unknown(matrix, _MATRIX_KEYS, "matrix")

    matrix_class = _require(matrix, "class", str, "matrix")
    if matrix_class not in KNOB_NAMES:
        raise UnknownMatrixClassError(
            f"Unknown matrix class '{matrix_class}' (expected one of: {', '.join(KNOB_NAMES)})"
        )
    m = _require(matrix, "m", int, "matrix")
    p = _require(matrix, "p", int, "matrix")
    s = _require(matrix, "s", int, "matrix")
    seed = _require_seed(_require(matrix, "seed", int, "matrix"))

    sweep = _require(matrix, "knob_sweep", list, "matrix")
    if not sweep:
        raise MalformedConfigError("'knob_sweep' must list at least one point")

    knob_sweep = []
    for i, point in enumerate(sweep):
        if not isinstance(point, dict):
            raise MalformedConfigError(f"knob_sweep[{i}] must be an object, got {type(point).__name__}")
        for name, value in point.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise MalformedConfigError(f"knob_sweep[{i}].{name} must be a number, got {value!r}")
        try:
            MatrixSpec(matrix_class, m, p, s, dict(point), seed)
        except MatrixSpecError as e:
            raise DimensionError(f"knob_sweep[{i}]: {e}") from None
        knob_sweep.append(dict(point))

    return matrix_class, m, p, s, knob_sweep, seed


def parse_config(text):
    """
    Parses and validates a JSON sweep configuration.

    Parameters:
    - text: str

    Returns:
    - SweepConfig

    Raises:
    - ConfigError subclasses, one per kind of problem
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedConfigError(f"Config is not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise MalformedConfigError("Config must be a JSON object")
    _reject_unknown(data, _TOP_LEVEL_KEYS, "config")

    matrix_class, m, p, s, knob_sweep, seed = _parse_matrix(data)

    algorithms = _parse_list(data, "algorithms")
    for name in algorithms:
        if name not in ALGORITHMS:
            raise UnknownAlgorithmError(f"Unknown algorithm '{name}' (expected one of: {', '.join(ALGORITHMS)})")

    ios = []
    for name in _parse_list(data, "ios"):
        try:
            ios.append(IntraorthId.from_name(name))
        except UnknownIntraorthError as e:
            raise UnknownIntraorthNameError(str(e)) from None

    mp_pair = None
    if data.get("mp_pair") is not None:
        raw = data["mp_pair"]
        if not isinstance(raw, list) or len(raw) != 2:
            raise MalformedConfigError(f"'mp_pair' must be a list of two precision names, got {raw!r}")
        low, high = (_parse_precision(name) for name in raw)
        try:
            PrecisionPair(low, high)
        except PrecisionOrderError as e:
            raise PrecisionPairOrderError(str(e)) from None
        mp_pair = (low, high)
    elif any(is_mixed(name) for name in algorithms):
        mp_pair = (PrecisionId.DOUBLE, PrecisionId.DOUBLE_DOUBLE)

    output_dir = data.get("output_dir", DEFAULT_OUTPUT_DIR)
    if not isinstance(output_dir, str) or not output_dir:
        raise MalformedConfigError(f"'output_dir' must be a non-empty string, got {output_dir!r}")

    precision = _parse_precision(data.get("precision", "double"))

    timing = data.get("timing", False)
    if not isinstance(timing, bool):
        raise MalformedConfigError(f"'timing' must be true or false, got {timing!r}")

    cholesky = data.get("cholesky", "nonstop")
    if not isinstance(cholesky, str) or cholesky not in CHOLESKY_VARIANTS:
        raise UnknownCholeskyNameError(
            f"Unknown Cholesky variant {cholesky!r} (expected one of: {', '.join(CHOLESKY_VARIANTS)})"
        )

    return SweepConfig(
        matrix_class=matrix_class,
        m=m,
        p=p,
        s=s,
        knob_sweep=knob_sweep,
        seed=seed,
        algorithms=list(algorithms),
        ios=ios,
        mp_pair=mp_pair,
        output_dir=output_dir,
        precision=precision,
        timing=timing,
        cholesky=cholesky,
    )


def load_config(path):
    """Reads and parses a config file."""
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise MalformedConfigError(f"Cannot read config '{path}': {e}") from None
    return parse_config(text)
