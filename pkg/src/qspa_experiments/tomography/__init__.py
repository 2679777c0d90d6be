from .readout import READOUT_PULSES, ReadoutExperiment, ObservableRecord, readout_set, \
    doublet_observables, simulate_readout, simulate_readout_set, add_readout_noise, \
    records_frame, records_from_frame, figure_data
from .reconstruct import DEVIATION_LABELS, ReconstructionResult, design_matrix, reconstruct
