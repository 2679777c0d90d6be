import numpy as np, pandas as pd
import dataclasses, enum, functools, itertools
from typing import Optional, Tuple
from ..util import UNITARY_ATOL, LABEL_ATOL, max_abs
from ..util.qlin import StateVector, CNOT, HADAMARD, I2, kron, apply_unitary, \
                        project_measure, projector, global_phase_overlap


class Bb84Label(str, enum.Enum):
    PLUS_Z = "+z"
    MINUS_Z = "-z"
    PLUS_X = "+x"
    MINUS_X = "-x"

    def __str__(self):
        return self.value

    @property
    def index(self):
        return list(Bb84Label).index(self)

    @property
    def amplitudes(self):
        return _BB84_AMPLITUDES[self]


_S = 1 / np.sqrt(2)
_BB84_AMPLITUDES = {
    Bb84Label.PLUS_Z: (1.0, 0.0),
    Bb84Label.MINUS_Z: (0.0, 1.0),
    Bb84Label.PLUS_X: (_S, _S),
    Bb84Label.MINUS_X: (_S, -_S),
}


@dataclasses.dataclass(frozen=True)
class PureQubitState:
    """ a|0> + b|1> with |a|^2 + |b|^2 = 1 """
    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        norm = abs(a) ** 2 + abs(b) ** 2
        if not np.isfinite(norm) or abs(norm - 1) > UNITARY_ATOL:
            raise ValueError(f"qubit state ({a}, {b}) is not normalized, |a|^2+|b|^2={norm:.12g}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_label(cls, label):
        return cls(*Bb84Label(label).amplitudes)

    @classmethod
    def from_amplitudes(cls, a, b, atol=UNITARY_ATOL):
        """ renormalize (a, b) when within atol of unit norm """
        norm = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
        if abs(norm ** 2 - 1) > atol:
            raise ValueError(f"amplitudes ({a}, {b}) deviate from unit norm by {abs(norm**2 - 1):.3e}")
        return cls(a / norm, b / norm)

    @property
    def vector(self):
        return np.array([self.a, self.b])

    @property
    def state(self):
        return StateVector(self.vector)

    def label(self, atol=LABEL_ATOL):
        return nearest_label(self, atol)


def as_qubit(x):
    if isinstance(x, PureQubitState):
        return x
    if isinstance(x, str):
        return PureQubitState.from_label(x)
    return PureQubitState(*x)


def nearest_label(state, atol=LABEL_ATOL):
    """ BB84 label equal to state up to global phase, else None """
    for label in Bb84Label:
        if abs(global_phase_overlap(label.amplitudes, state.vector) - 1) <= atol:
            return label
    return None


def phase_aligned_deviation(u, v):
    """ max |u e^{-i arg<v|u>} - v| """
    u, v = np.asarray(u, dtype=complex), np.asarray(v, dtype=complex)
    overlap = np.vdot(v, u)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1
    return max_abs(u / phase - v)


REFERENCE_INPUTS = {
    "basis": (PureQubitState(1, 0), PureQubitState(0, 1)),
    "general": (
        PureQubitState(np.sqrt(3) / 2, 0.5),
        PureQubitState(np.cos(np.pi / 12), np.sin(np.pi / 12)),
    ),
}


@functools.lru_cache(None)
def chc_unitary():
    """ CNOT_12 . (H x I) . CNOT_12 with qubit 1 as control """
    U = CNOT @ np.kron(HADAMARD, I2) @ CNOT
    U.flags.writeable = False
    return U


def apply_chc(phi1, phi2):
    """ joint CHC output state for product input phi1 x phi2 """
    phi1, phi2 = as_qubit(phi1), as_qubit(phi2)
    return apply_unitary(chc_unitary(), kron(phi1.state, phi2.state))


@dataclasses.dataclass(frozen=True)
class CondensationResult:
    outcome: int
    probability: float
    condensed: PureQubitState
    condensed_label: Optional[Bb84Label] = None


def _measure_kw(policy):
    if isinstance(policy, np.random.Generator):
        return {"rng": policy}
    return {"forced_outcome": int(policy)}


def condense(joint, policy):
    """ measure the target qubit in sigma_z and keep the control qubit;
    policy is a forced outcome bit or a numpy Generator
    """
    record = project_measure(joint, 2, **_measure_kw(policy))
    o = record.outcome
    amp = record.collapsed.data[[o, 2 + o]]
    amp = amp / np.linalg.norm(amp)
    condensed = PureQubitState(amp[0], amp[1])
    return CondensationResult(o, record.probability, condensed, nearest_label(condensed))


# rows: phi2, columns: phi1, both in the order +z, -z, +x, -x
_TABLE_ROWS = {
    0: [["+z", "-z", "-x", "+x"],
        ["-z", "+z", "+x", "-x"],
        ["+x", "-x", "+z", "-z"],
        ["-x", "+x", "-z", "+z"]],
    1: [["-z", "+z", "+x", "-x"],
        ["+z", "-z", "-x", "+x"],
        ["+x", "-x", "+z", "-z"],
        ["-x", "+x", "-z", "+z"]],
}


def truth_table(phi1, phi2, outcome):
    """ condensed control label for BB84 inputs and target outcome """
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    phi1, phi2 = Bb84Label(phi1), Bb84Label(phi2)
    return Bb84Label(_TABLE_ROWS[outcome][phi2.index][phi1.index])


@functools.lru_cache(None)
def truth_table_array():
    """ int8 array [outcome, phi1, phi2] -> condensed label index """
    out = np.zeros((2, 4, 4), dtype=np.int8)
    for o, p1, p2 in itertools.product((0, 1), Bb84Label, Bb84Label):
        out[o, p1.index, p2.index] = truth_table(p1, p2, o).index
    out.flags.writeable = False
    return out


def truth_table_frame(outcome):
    labels = [str(x) for x in Bb84Label]
    return pd.DataFrame(
        _TABLE_ROWS[outcome],
        index=pd.Index(labels, name="phi2"),
        columns=pd.Index(labels, name="phi1"))


@dataclasses.dataclass
class TruthTableReport:
    cases: int
    mismatches: int
    max_deviation: float
    failures: list = dataclasses.field(default_factory=list)


def verify_truth_tables():
    """ cross-check the printed tables against condense(apply_chc(...)) """
    report = TruthTableReport(0, 0, 0.0)
    for p1, p2, o in itertools.product(Bb84Label, Bb84Label, (0, 1)):
        expect = truth_table(p1, p2, o)
        got = condense(apply_chc(p1, p2), o)
        dev = phase_aligned_deviation(got.condensed.vector, expect.amplitudes)
        report.cases += 1
        report.max_deviation = max(report.max_deviation, dev)
        if got.condensed_label != expect:
            report.mismatches += 1
            report.failures.append((str(p1), str(p2), o, str(expect), got.condensed_label))
    return report


@dataclasses.dataclass(frozen=True)
class QspaRound:
    target: PureQubitState
    outcome: int
    probability: float


@dataclasses.dataclass(frozen=True)
class QspaTranscript:
    rounds: Tuple[QspaRound, ...]
    final: PureQubitState

    @property
    def probability(self):
        return float(np.prod([r.probability for r in self.rounds]))

    @property
    def final_label(self):
        return nearest_label(self.final)


def recursive_qspa(states, policy):
    """ fold left: the retained control of each round meets the next target;
    policy is a list of forced bits (one per round) or a numpy Generator
    """
    states = [as_qubit(s) for s in states]
    if len(states) < 2:
        raise ValueError(f"recursive QSPA needs at least 2 states, got {len(states)}")
    n_rounds = len(states) - 1

    if isinstance(policy, np.random.Generator):
        policies = [policy] * n_rounds
    else:
        policies = list(policy)
        if len(policies) != n_rounds:
            raise ValueError(f"expected {n_rounds} forced outcomes, got {len(policies)}")

    control, rounds = states[0], []
    for target, p in zip(states[1:], policies):
        res = condense(apply_chc(control, target), p)
        rounds.append(QspaRound(target, res.outcome, res.probability))
        control = res.condensed
    return QspaTranscript(tuple(rounds), control)


def reference_states():
    """ {"basis-input", "basis-output", "general-input", "general-output"} density matrices """
    out = {}
    for name, (phi1, phi2) in REFERENCE_INPUTS.items():
        out[f"{name}-input"] = projector(kron(phi1.state, phi2.state))
        out[f"{name}-output"] = projector(apply_chc(phi1, phi2))
    return out
