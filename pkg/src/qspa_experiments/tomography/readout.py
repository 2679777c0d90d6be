import numpy as np, pandas as pd
import dataclasses, functools, itertools
from typing import Tuple
from ..util.qlin import BASIS_LABELS, check_physical
from ..nmr.pulses import Rotation, rotation_propagator
from ..nmr.spin_system import spin_operator


READOUT_PULSES = ("none", "x90", "y90")
N_OBSERVABLES = 8


@dataclasses.dataclass(frozen=True)
class ReadoutExperiment:
    pulse1: str
    pulse2: str

    def __post_init__(self):
        for p in (self.pulse1, self.pulse2):
            if p not in READOUT_PULSES:
                raise ValueError(f"unknown readout pulse {p!r}, expected one of {READOUT_PULSES}")

    @property
    def id(self):
        return f"{self.pulse1}-{self.pulse2}"

    def unitary(self):
        U = np.eye(4, dtype=complex)
        for spin, p in [(1, self.pulse1), (2, self.pulse2)]:
            if p != "none":
                U = rotation_propagator(Rotation(spin, p[0], np.pi / 2)) @ U
        return U


@dataclasses.dataclass(frozen=True)
class ObservableRecord:
    """ doublet quadratures: for spin k (other spin j), <2Ix^k(1/2+Iz^j)>,
    <2Iy^k(1/2+Iz^j)>, <2Ix^k(1/2-Iz^j)>, <2Iy^k(1/2-Iz^j)>
    """
    experiment_id: str
    values: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if len(values) != N_OBSERVABLES:
            raise ValueError(f"expected {N_OBSERVABLES} observables, got {len(values)}")
        if not np.isfinite(values).all():
            raise ValueError(f"observables of {self.experiment_id} must be finite")
        object.__setattr__(self, "values", values)


def readout_set():
    return [ReadoutExperiment(p1, p2) for p1, p2 in itertools.product(READOUT_PULSES, repeat=2)]


@functools.lru_cache(None)
def doublet_observables():
    out = []
    for k, j in [(1, 2), (2, 1)]:
        up = np.eye(4) / 2 + spin_operator("z", j)
        down = np.eye(4) / 2 - spin_operator("z", j)
        for half in (up, down):
            out.append(2 * spin_operator("x", k) @ half)
            out.append(2 * spin_operator("y", k) @ half)
    return tuple(out)


def simulate_readout(rho, e):
    check_physical(rho)
    if rho.dim != 4:
        raise ValueError(f"simulate_readout expects a two-spin state, got dim {rho.dim}")
    U = e.unitary()
    rotated = U @ rho.data @ U.conj().T
    return ObservableRecord(
        e.id, [np.real(np.trace(O @ rotated)) for O in doublet_observables()])


def simulate_readout_set(rho):
    return [simulate_readout(rho, e) for e in readout_set()]


def add_readout_noise(records, sigma, rng):
    """ i.i.d. additive Gaussian noise on every observable """
    if not sigma >= 0:
        raise ValueError(f"noise sigma must be >= 0, got {sigma}")
    return [ObservableRecord(r.experiment_id, np.add(r.values, rng.normal(0, sigma, N_OBSERVABLES)))
            for r in records]


def records_frame(records):
    return pd.DataFrame(
        [[r.experiment_id, *r.values] for r in records],
        columns=["experiment_id"] + [f"obs_{i}" for i in range(1, N_OBSERVABLES + 1)])


def records_from_frame(df):
    cols = [f"obs_{i}" for i in range(1, N_OBSERVABLES + 1)]
    missing = [c for c in ["experiment_id"] + cols if c not in df.columns]
    if missing:
        raise ValueError(f"records table is missing columns {missing}")
    return [ObservableRecord(str(row.experiment_id), [getattr(row, c) for c in cols])
            for row in df.itertuples(index=False)]


def figure_data(rho):
    """ row-major (row, col, real, imag) entries for 3D bar charts """
    data = np.asarray(getattr(rho, "data", rho), dtype=complex)
    if data.shape != (4, 4):
        raise ValueError(f"figure_data expects a 4x4 matrix, got {data.shape}")
    return pd.DataFrame([
        {"row": BASIS_LABELS[i], "col": BASIS_LABELS[j],
         "real": float(data[i, j].real), "imag": float(data[i, j].imag)}
        for i in range(4) for j in range(4)
    ])
