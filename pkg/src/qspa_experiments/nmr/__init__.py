from .spin_system import SpinSystem, PrepConfig, spin_operator, hamiltonian, delay_propagator, \
    thermal_state, prep_angle, gradient_crush
from .product_operator import PRODUCT_OPERATOR_LABELS, ProductOperatorExpansion, \
    product_operator_basis, product_operator_expand
from .pulses import Rotation, Delay, GradientZ, PulseSequence, rotation_propagator, \
    event_propagator, sequence_unitary, run_sequence
from .sequences import QSPA_MODES, refocused_j_block, cnot_pulse_sequence, hadamard_block, \
    qspa_pulse_sequence, prepare_input_state, pseudopure_prep_steps, pseudopure_prep_sequence, \
    pseudopure_target, pseudopure_prep, replay_pseudopure_prep, replay_frame, replay_log
from .equivalence import FREEDOMS, EquivalenceResult, equivalent_up_to_phase
from .pulse_text import PulseSyntaxError, dumps_sequence, loads_sequence, load_sequence
from .pipeline import NmrRun, run_nmr_pipeline
