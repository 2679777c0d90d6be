__version__ = "1.0"

import numpy as np, pandas as pd
import dataclasses, json
from typing import Dict, List
from qspa_experiments.util import timed
from qspa_experiments.util.qlin import CNOT, projector, fidelity
from qspa_experiments.protocol import *
from qspa_experiments.nmr import *
from qspa_experiments.tomography import *


@dataclasses.dataclass
class ExperimentResult:
    name: str
    mode: str
    amplitudes: List[float]
    populations: List[float]
    nmr_fidelity: float
    cnot_residual: float
    qspa_residual: float
    qspa_verdict: bool
    tomo_error: float
    tomo_noisy_fidelity: float

    leakage: Dict[str, List[float]] = dataclasses.field(default_factory=dict)

    def print_results(self):
        print(f'\n{self.name} inputs, {self.mode}')
        print(pd.DataFrame({
            'amplitude': self.amplitudes,
            'population': self.populations,
        }, index=["00", "01", "10", "11"]))
        print(pd.Series({
            'nmr_fidelity': self.nmr_fidelity,
            'cnot_residual': self.cnot_residual,
            'qspa_residual': self.qspa_residual,
            'tomo_error': self.tomo_error,
            'tomo_noisy_fidelity': self.tomo_noisy_fidelity,
        }))
        print('\nleakage')
        print(pd.DataFrame(self.leakage, index=pd.RangeIndex(
            1, 1 + max(map(len, self.leakage.values()), default=0), name='rounds')))

    def save_results(self, fn):
        with open(fn, 'w') as fp:
            json.dump(dataclasses.asdict(self), fp)


LEAKAGE_MODELS = {
    "none": KnowledgeModel("none"),
    "control": KnowledgeModel("control"),
    "target": KnowledgeModel("target"),
    "all": KnowledgeModel("all"),
    "all+outcomes": KnowledgeModel("all", True),
}


def main(name, mode="verified-default", noise=0.01, seed=0, max_rounds=3, **sys_kw):
    """ run the circuit, pulse, tomography and leakage experiments on one
    reference input pair ("basis" or "general")
    """
    if name not in REFERENCE_INPUTS:
        raise ValueError(f"unknown {name}, expected one of {sorted(REFERENCE_INPUTS)}")
    phi1, phi2 = REFERENCE_INPUTS[name]
    sys = SpinSystem(**sys_kw)

    joint = apply_chc(phi1, phi2)
    truth = projector(joint)
    run = run_nmr_pipeline(phi1, phi2, sys, mode)

    cnot = equivalent_up_to_phase(sequence_unitary(cnot_pulse_sequence(sys), sys), CNOT)
    qspa = equivalent_up_to_phase(
        sequence_unitary(qspa_pulse_sequence(sys, mode), sys), chc_unitary(), "global-plus-z")

    with timed("tomography"):
        records = simulate_readout_set(truth)
        clean = reconstruct(records)
        noisy = reconstruct(add_readout_noise(records, noise, np.random.default_rng(seed)))

    results = ExperimentResult(
        name, mode,
        amplitudes=np.real(joint.data).tolist(),
        populations=run.populations.tolist(),
        nmr_fidelity=fidelity(run.output_state, truth),
        cnot_residual=cnot.max_deviation,
        qspa_residual=qspa.max_deviation,
        qspa_verdict=qspa.verdict,
        tomo_error=float(np.abs(clean.rho.data - truth.data).max()),
        tomo_noisy_fidelity=noisy.fidelity(truth),
        leakage={k: [r.guess_probability for r in leakage_curve(m, max_rounds)]
                 for k, m in LEAKAGE_MODELS.items()},
    )
    results.print_results()
    return results
