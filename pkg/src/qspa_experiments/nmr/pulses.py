import numpy as np
import dataclasses, functools
from typing import Tuple, Union
from ..util import format_pi_fraction
from ..util.qlin import PAULI, I2, apply_unitary
from .spin_system import delay_propagator, gradient_crush


AXIS_SIGNS = {"x": ("x", 1), "-x": ("x", -1), "y": ("y", 1), "-y": ("y", -1),
              "z": ("z", 1), "-z": ("z", -1)}
SYMBOLIC_DELAYS = {"1/(2J)": 2, "1/(4J)": 4}


@dataclasses.dataclass(frozen=True)
class Rotation:
    """ [angle]_axis on the given spins """
    spins: Tuple[int, ...]
    axis: str
    angle: float

    def __post_init__(self):
        spins = tuple(sorted(set(int(k) for k in np.atleast_1d(self.spins))))
        if not spins or any(k not in (1, 2) for k in spins):
            raise ValueError(f"rotation spins must be a nonempty subset of (1, 2), got {self.spins}")
        if self.axis not in AXIS_SIGNS:
            raise ValueError(f"unknown rotation axis {self.axis!r}")
        if not np.isfinite(self.angle):
            raise ValueError(f"rotation angle must be finite, got {self.angle}")
        object.__setattr__(self, "spins", spins)
        object.__setattr__(self, "angle", float(self.angle))

    def __str__(self):
        return f"[{format_pi_fraction(self.angle)}]_{self.axis}^{''.join(map(str, self.spins))}"


@dataclasses.dataclass(frozen=True)
class Delay:
    """ free evolution; duration in seconds or one of "1/(2J)", "1/(4J)" """
    duration: Union[float, str]

    def __post_init__(self):
        if isinstance(self.duration, str):
            if self.duration not in SYMBOLIC_DELAYS:
                raise ValueError(f"unknown symbolic delay {self.duration!r}")
        elif not (np.isfinite(self.duration) and self.duration >= 0):
            raise ValueError(f"delay must be finite and >= 0, got {self.duration}")
        else:
            object.__setattr__(self, "duration", float(self.duration))

    def seconds(self, sys):
        if isinstance(self.duration, str):
            return 1 / (SYMBOLIC_DELAYS[self.duration] * sys.require_coupling())
        return self.duration

    def __str__(self):
        return f"[{self.duration}]"


@dataclasses.dataclass(frozen=True)
class GradientZ:
    def __str__(self):
        return "[grad]_z"


@dataclasses.dataclass(frozen=True)
class PulseSequence:
    events: Tuple = ()
    label: str = ""

    def __post_init__(self):
        events = tuple(self.events)
        for e in events:
            if not isinstance(e, (Rotation, Delay, GradientZ)):
                raise ValueError(f"not a pulse event: {e!r}")
        object.__setattr__(self, "events", events)

    def __add__(self, other):
        label = " -> ".join(x for x in (self.label, other.label) if x)
        return PulseSequence(self.events + other.events, label)

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __str__(self):
        return " -> ".join(map(str, self.events))


@functools.lru_cache(maxsize=256)
def _single_spin_rotation(axis, angle):
    name, sign = AXIS_SIGNS[axis]
    R = np.cos(angle / 2) * I2 - 1j * np.sin(angle / 2) * sign * PAULI[name]
    R.flags.writeable = False
    return R


def rotation_propagator(e):
    """ exp(-i angle sum_k I_axis^k), I = sigma / 2 """
    R = _single_spin_rotation(e.axis, e.angle)
    return np.kron(R if 1 in e.spins else I2, R if 2 in e.spins else I2)


def event_propagator(e, sys):
    if isinstance(e, Rotation):
        return rotation_propagator(e)
    if isinstance(e, Delay):
        return delay_propagator(e.seconds(sys), sys)
    raise ValueError(f"{e} is not unitary; execute gradients with run_sequence")


def sequence_unitary(seq, sys):
    """ U_n ... U_1 for events applied left to right """
    U = np.eye(4, dtype=complex)
    for e in seq:
        if isinstance(e, GradientZ):
            raise ValueError(
                f"sequence {seq.label!r} contains a gradient; use run_sequence for non-unitary steps")
        U = event_propagator(e, sys) @ U
    return U


def run_sequence(seq, rho, sys):
    if rho.dim != 4:
        raise ValueError(f"run_sequence expects a two-spin matrix, got dim {rho.dim}")
    for e in seq:
        if isinstance(e, GradientZ):
            rho = gradient_crush(rho)
        else:
            rho = apply_unitary(event_propagator(e, sys), rho)
    return rho
