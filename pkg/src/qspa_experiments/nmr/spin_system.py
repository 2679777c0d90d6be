import numpy as np
import dataclasses, functools
from ..util import warn_nonfinite_output
from ..util.qlin import PAULI, I2, DensityMatrix


@dataclasses.dataclass(frozen=True)
class SpinSystem:
    """ 13C (spin 1) - 1H (spin 2) pair in the doubly rotating frame;
    offsets and coupling in Hz, gyromagnetic ratios in rad/s/T
    """
    nu1: float = 0.0
    nu2: float = 0.0
    J12: float = 215.0
    gammaC: float = 6.728e7
    gammaH: float = 2.6752e8

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = float(getattr(self, f.name))
            if not np.isfinite(v):
                raise ValueError(f"SpinSystem.{f.name} must be finite, got {v}")
            object.__setattr__(self, f.name, v)
        if self.J12 < 0:
            raise ValueError(f"J12 must be >= 0, got {self.J12}")

    def require_coupling(self):
        if self.J12 <= 0:
            raise ValueError(f"operation needs J12 > 0, got {self.J12}")
        return self.J12


@dataclasses.dataclass(frozen=True)
class PrepConfig:
    theta: float


@functools.lru_cache(None)
def spin_operator(axis, spin):
    """ I_axis = sigma_axis / 2 on one spin, identity on the other """
    if spin not in (1, 2):
        raise ValueError(f"spin must be 1 or 2, got {spin}")
    single = PAULI[axis] / 2
    out = np.kron(single, I2) if spin == 1 else np.kron(I2, single)
    out.flags.writeable = False
    return out


def hamiltonian(sys):
    """ -pi nu1 sz1 - pi nu2 sz2 + (pi/2) J sz1 sz2, in rad/s """
    z1, z2 = 2 * spin_operator("z", 1), 2 * spin_operator("z", 2)
    return np.real(-np.pi * sys.nu1 * z1 - np.pi * sys.nu2 * z2
                   + np.pi / 2 * sys.J12 * z1 @ z2)


@warn_nonfinite_output
def delay_propagator(t, sys):
    if not t >= 0:
        raise ValueError(f"delay must be >= 0, got {t}")
    return np.diag(np.exp(-1j * np.diag(hamiltonian(sys)) * t))


def thermal_state(sys):
    """ high-temperature deviation gammaC Iz1 + gammaH Iz2 """
    return DensityMatrix(
        sys.gammaC * spin_operator("z", 1) + sys.gammaH * spin_operator("z", 2),
        deviation=True)


def prep_angle(sys):
    """ cos(theta) = 2 gammaC / gammaH """
    if sys.gammaH <= 0:
        raise ValueError(f"gammaH must be positive, got {sys.gammaH}")
    ratio = 2 * sys.gammaC / sys.gammaH
    if not 0 <= ratio < 1:
        raise ValueError(f"2*gammaC/gammaH = {ratio:.6g} has no real preparation angle")
    return PrepConfig(float(np.arccos(ratio)))


def gradient_crush(rho):
    """ keep only coherence-order-0 elements: diagonal plus |01><10|, |10><01| """
    if rho.dim != 4:
        raise ValueError(f"gradient_crush expects a two-spin matrix, got dim {rho.dim}")
    return DensityMatrix(rho.data * _zero_quantum_mask(), deviation=rho.deviation)


@functools.lru_cache(None)
def _zero_quantum_mask():
    m = np.array([bin(i).count("1") for i in range(4)])
    return m[:, None] == m[None, :]
