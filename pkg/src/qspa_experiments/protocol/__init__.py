from .chc import Bb84Label, PureQubitState, CondensationResult, QspaRound, QspaTranscript, \
    TruthTableReport, REFERENCE_INPUTS, reference_states, as_qubit, nearest_label, chc_unitary, apply_chc, \
    condense, truth_table, truth_table_array, truth_table_frame, verify_truth_tables, \
    recursive_qspa
from .adversary import KnowledgeModel, LeakageReport, MAX_ROUNDS, outcome_distribution, \
    guess_probability, leakage_curve, leakage_frame
