import numpy as np
import dataclasses
from typing import Optional
from ..util import timed
from ..util.qlin import DensityMatrix, effective_state
from .spin_system import SpinSystem, thermal_state
from .pulses import PulseSequence, run_sequence
from .sequences import pseudopure_prep_sequence, prepare_input_state, qspa_pulse_sequence


@dataclasses.dataclass
class NmrRun:
    """ deviation matrices along the experiment and the states they represent """
    pseudopure: DensityMatrix
    input_deviation: DensityMatrix
    output_deviation: DensityMatrix
    qspa: PulseSequence

    @property
    def input_state(self):
        return effective_state(self.input_deviation)

    @property
    def output_state(self):
        return effective_state(self.output_deviation)

    @property
    def populations(self):
        return np.real(np.diag(self.output_state.data))


def run_nmr_pipeline(phi1, phi2, sys=None, mode="verified-default",
                     qspa: Optional[PulseSequence] = None):
    """ thermal -> pseudopure |00> -> input rotations -> QSPA sequence;
    `qspa` replaces the built-in sequence when given
    """
    sys = sys or SpinSystem()
    qspa = qspa if qspa is not None else qspa_pulse_sequence(sys, mode)

    with timed(f"nmr pipeline {qspa.label or 'custom'}"):
        pseudopure = run_sequence(pseudopure_prep_sequence(sys), thermal_state(sys), sys)
        input_dev = run_sequence(prepare_input_state(phi1, phi2), pseudopure, sys)
        output_dev = run_sequence(qspa, input_dev, sys)
    return NmrRun(pseudopure, input_dev, output_dev, qspa)
