import numpy as np
import dataclasses, functools
from ..util import max_abs
from ..util.qlin import DensityMatrix, fidelity
from ..nmr.product_operator import PRODUCT_OPERATOR_LABELS, product_operator_basis
from .readout import readout_set, doublet_observables


DEVIATION_LABELS = PRODUCT_OPERATOR_LABELS[1:]


@dataclasses.dataclass
class ReconstructionResult:
    rho: DensityMatrix
    residual: float
    condition_number: float

    @property
    def min_eigenvalue(self):
        return float(self.rho.eigenvalues.min())

    def fidelity(self, truth):
        """ negative eigenvalues from noisy data are kept, not clipped """
        return fidelity(self.rho, truth, check_positivity=False)


@functools.lru_cache(None)
def design_matrix():
    """ 72 x 15: A[(experiment, observable), B] = Re Tr(U^dagger O U B) """
    basis = product_operator_basis()
    rows = []
    for e in readout_set():
        U = e.unitary()
        for O in doublet_observables():
            back = U.conj().T @ O @ U
            rows.append([np.real(np.trace(back @ basis[b])) for b in DEVIATION_LABELS])
    A = np.array(rows)
    A.flags.writeable = False
    return A


def reconstruct(records):
    """ least-squares linear inversion over the full readout set """
    by_id = {r.experiment_id: r for r in records}
    ids = [e.id for e in readout_set()]
    missing = [i for i in ids if i not in by_id]
    if missing or len(by_id) != len(records):
        raise ValueError(f"reconstruct needs one record per readout experiment, missing {missing}")
    y = np.concatenate([by_id[i].values for i in ids])

    A = design_matrix()
    coef, _, rank, sv = np.linalg.lstsq(A, y, rcond=None)
    if rank < len(DEVIATION_LABELS):
        raise ValueError(f"design matrix is rank deficient ({rank} < {len(DEVIATION_LABELS)})")

    basis = product_operator_basis()
    rho = np.eye(4, dtype=complex) / 4 + sum(c * basis[b] for c, b in zip(coef, DEVIATION_LABELS))
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho).real
    return ReconstructionResult(
        DensityMatrix(rho), max_abs(A @ coef - y), float(sv[0] / sv[-1]))
