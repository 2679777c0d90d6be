import numpy as np, pandas as pd
from ..util import max_abs
from ..util.qlin import DensityMatrix
from ..protocol.chc import as_qubit
from .spin_system import thermal_state, prep_angle, spin_operator
from .pulses import Rotation, Delay, GradientZ, PulseSequence, run_sequence
from .product_operator import ProductOperatorExpansion, product_operator_expand


QSPA_MODES = ("verified-default", "paper-literal")
_SQ2 = np.sqrt(2)


def refocused_j_block(sys):
    """ tau -> [pi]_x^12 -> tau -> [pi]_-x^12 with tau = 1/(4J);
    net effect is J evolution for 1/(2J) with chemical shifts refocused
    """
    sys.require_coupling()
    return PulseSequence([
        Delay("1/(4J)"),
        Rotation((1, 2), "x", np.pi),
        Delay("1/(4J)"),
        Rotation((1, 2), "-x", np.pi),
    ], "1/(2J)")


def cnot_pulse_sequence(sys):
    """ control spin 1, target spin 2; equals CNOT up to the global phase e^{i pi/4} """
    return (PulseSequence([Rotation(2, "-y", np.pi / 2)])
            + refocused_j_block(sys)
            + PulseSequence([Rotation((1, 2), "-z", np.pi / 2), Rotation(2, "y", np.pi / 2)],
                            "CNOT"))


def hadamard_block():
    """ [pi/2]_y^1 -> [pi]_-x^1, i.e. i H on spin 1 """
    return PulseSequence([Rotation(1, "y", np.pi / 2), Rotation(1, "-x", np.pi)], "H")


def _literal_cnot(sys):
    return (PulseSequence([Rotation(2, "y", np.pi / 2)])
            + refocused_j_block(sys)
            + PulseSequence([
                Rotation(2, "-y", np.pi),
                Rotation(2, "x", np.pi / 2),
                Rotation((1, 2), "z", np.pi / 2),
            ]))


def qspa_pulse_sequence(sys, mode="verified-default"):
    if mode == "verified-default":
        seq = cnot_pulse_sequence(sys) + hadamard_block() + cnot_pulse_sequence(sys)
    elif mode == "paper-literal":
        seq = _literal_cnot(sys) + hadamard_block() + _literal_cnot(sys)
    else:
        raise ValueError(f"unknown QSPA mode {mode!r}, expected one of {QSPA_MODES}")
    return PulseSequence(seq.events, f"QSPA ({mode})")


def prepare_input_state(target1, target2, atol=1e-12):
    """ y rotations taking |00> to target1 x target2; angle 2 atan2(b, a) per spin """
    events = []
    for spin, target in [(1, target1), (2, target2)]:
        q = as_qubit(target)
        if abs(q.a.imag) > atol or abs(q.b.imag) > atol:
            raise ValueError(f"input state for spin {spin} has complex amplitudes ({q.a}, {q.b})")
        angle = 2 * np.arctan2(q.b.real, q.a.real)
        if abs(angle) > atol:
            events.append(Rotation(spin, "y", angle))
    return PulseSequence(events, "input")


def pseudopure_prep_steps(sys):
    theta = prep_angle(sys).theta
    return [
        PulseSequence([Rotation(2, "x", theta)], "[theta]_x^2"),
        PulseSequence([GradientZ()], "[grad]_z"),
        PulseSequence([Rotation(2, "-x", np.pi / 4)], "[pi/4]_-x^2"),
        refocused_j_block(sys),
        PulseSequence([Rotation(2, "y", np.pi / 4)], "[pi/4]_y^2"),
        PulseSequence([GradientZ()], "[grad]_z"),
    ]


def pseudopure_prep_sequence(sys):
    steps = pseudopure_prep_steps(sys)
    out = steps[0]
    for s in steps[1:]:
        out = out + s
    return PulseSequence(out.events, "pseudopure")


def pseudopure_target(sys):
    """ 2 gammaC [(1/2 + Iz1)(1/2 + Iz2) - 1/4] """
    a = np.eye(4) / 2 + spin_operator("z", 1)
    b = np.eye(4) / 2 + spin_operator("z", 2)
    return DensityMatrix(2 * sys.gammaC * (a @ b - np.eye(4) / 4), deviation=True)


def pseudopure_prep(sys):
    """ spatial averaging from the thermal deviation; returns (final, expansions per step) """
    rho, intermediates = thermal_state(sys), []
    for step in pseudopure_prep_steps(sys):
        rho = run_sequence(step, rho, sys)
        intermediates.append(product_operator_expand(rho))

    scale = max(1.0, abs(sys.gammaC), abs(sys.gammaH))
    assert max_abs(rho.data - pseudopure_target(sys).data) <= 1e-10 * scale, \
        "pseudopure preparation did not reach the |00> deviation"
    return rho, intermediates


def _replay_expectations(sys):
    """ per-step coefficients in units of gammaC """
    transverse = -np.sqrt(sys.gammaH ** 2 - 4 * sys.gammaC ** 2) / sys.gammaC
    return [
        {"Iz1": 1, "Iz2": 2, "Iy2": transverse},
        {"Iz1": 1, "Iz2": 2},
        {"Iz1": 1, "Iz2": _SQ2, "Iy2": _SQ2},
        {"Iz1": 1, "Iz2": _SQ2, "2Iz1Ix2": -_SQ2},
        {"Iz1": 1, "Iz2": 1, "Ix2": 1, "2Iz1Ix2": -1, "2Iz1Iz2": 1},
        {"Iz1": 1, "Iz2": 1, "2Iz1Iz2": 1},
    ]


def replay_pseudopure_prep(sys):
    """ spatial-averaging replay in units of gammaC, one row per step """
    if sys.gammaC == 0:
        raise ValueError("replay is expressed in units of gammaC, which must be nonzero")
    _, intermediates = pseudopure_prep(sys)
    rows = []
    for step, got, expect in zip(
            pseudopure_prep_steps(sys), intermediates, _replay_expectations(sys)):
        got = got.scaled(1 / sys.gammaC)
        rows.append({
            "step": step.label,
            "expression": got.format(),
            "expected": ProductOperatorExpansion(
                {k: float(v) for k, v in expect.items()}).format(),
            "max_deviation": got.max_deviation(expect),
        })

    # the textbook form of the first transverse term, sqrt(1 - 4 gammaC^2 / gammaH^2), drops gammaH
    rows[0]["exact_transverse"] = float(np.sqrt(sys.gammaH ** 2 - 4 * sys.gammaC ** 2))
    rows[0]["printed_transverse"] = float(np.sqrt(1 - 4 * sys.gammaC ** 2 / sys.gammaH ** 2))
    return rows


def replay_frame(sys):
    return pd.DataFrame(replay_pseudopure_prep(sys))


def replay_log(sys):
    rows = replay_pseudopure_prep(sys)
    lines = ["# spatial averaging replay, coefficients in units of gammaC"]
    lines += [f"{r['step']}: {r['expression']}" for r in rows]
    lines.append(
        f"# {rows[0]['step']} transverse scalar: exact {rows[0]['exact_transverse']!r}, "
        f"printed {rows[0]['printed_transverse']!r}")
    return "\n".join(lines) + "\n"
