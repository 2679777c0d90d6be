import numpy as np
import dataclasses, hashlib, json, os
from typing import Dict, List
from .util.qlin import BASIS_LABELS, DensityMatrix
from .nmr.spin_system import SpinSystem


FORMATS = ("json", "csv")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    nu1: float = 0.0
    nu2: float = 0.0
    J12: float = 215.0
    gammaC: float = 6.728e7
    gammaH: float = 2.6752e8
    out: str = "."
    format: str = "json"

    def __post_init__(self):
        if isinstance(self.seed, bool) or int(self.seed) != self.seed:
            raise ValueError(f"seed must be an integer, got {self.seed!r}")
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}, expected one of {FORMATS}")
        if not self.J12 > 0:
            raise ValueError(f"J12 must be > 0, got {self.J12}")
        self.spin_system  # validates the remaining physics fields

    @property
    def spin_system(self):
        return SpinSystem(self.nu1, self.nu2, self.J12, self.gammaC, self.gammaH)

    def config_hash(self):
        fields = {k: v for k, v in dataclasses.asdict(self).items() if k != "out"}
        blob = json.dumps(fields, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def _coerce(key, value):
    try:
        return _FIELD_TYPES[key](value)
    except ValueError:
        raise ValueError(f"config key {key!r}: cannot parse {value!r}")


def load_config(path):
    """ flat `key = value` file, `#` starts a comment """
    out = {}
    with open(path) as fp:
        for lineno, line in enumerate(fp, 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            key, sep, value = (s.strip() for s in body.partition("="))
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key = value, got {body!r}")
            if key not in _FIELD_TYPES:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            out[key] = _coerce(key, value)
    return out


def resolve_config(flags=None, config_path=None):
    """ flags > config file > defaults; None flags are unset """
    kw = load_config(config_path) if config_path else {}
    kw.update({k: v for k, v in (flags or {}).items() if v is not None})
    return RunConfig(**kw)


@dataclasses.dataclass
class DensityMatrixFile:
    basis_labels: List[str]
    real: List[List[float]]
    imag: List[List[float]]
    metadata: Dict[str, str]

    @classmethod
    def from_matrix(cls, rho, source, config_hash=""):
        from . import __version__
        data = np.asarray(getattr(rho, "data", rho), dtype=complex)
        return cls(
            list(BASIS_LABELS),
            data.real.astype(float).tolist(),
            data.imag.astype(float).tolist(),
            {"source": source, "config_hash": config_hash, "tool_version": __version__})

    def matrix(self):
        return np.array(self.real) + 1j * np.array(self.imag)

    def density_matrix(self, deviation=False):
        return DensityMatrix(self.matrix(), deviation=deviation)

    def dumps(self):
        # json emits floats with the shortest round-trip repr
        return json.dumps(dataclasses.asdict(self), indent=2) + "\n"

    @classmethod
    def loads(cls, text):
        obj = json.loads(text)
        missing = {"basis_labels", "real", "imag", "metadata"} - set(obj)
        if missing:
            raise ValueError(f"density matrix file is missing {sorted(missing)}")
        if list(obj["basis_labels"]) != list(BASIS_LABELS):
            raise ValueError(f"unexpected basis labels {obj['basis_labels']}")
        if np.shape(obj["real"]) != (4, 4) or np.shape(obj["imag"]) != (4, 4):
            raise ValueError("real and imag must be 4x4 arrays")
        real = [[float(x) for x in row] for row in obj["real"]]
        imag = [[float(x) for x in row] for row in obj["imag"]]
        return cls(obj["basis_labels"], real, imag, obj["metadata"])


def write_density_matrix(path, rho, source, config_hash=""):
    text = DensityMatrixFile.from_matrix(rho, source, config_hash).dumps()
    with open(path, "w") as fp:
        fp.write(text)
    return path


def read_density_matrix(path):
    with open(path) as fp:
        return DensityMatrixFile.loads(fp.read())


def output_path(cfg, name):
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)
