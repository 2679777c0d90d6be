import numpy as np
import dataclasses
from . import UNITARY_ATOL, EIG_ATOL, PROB_ATOL, max_abs, warn_nonfinite_output


I2 = np.eye(2, dtype=complex)
PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
# qubit 1 (control) is the most significant bit
CNOT = np.array([
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
], dtype=complex)
BASIS_LABELS = ("00", "01", "10", "11")


def _readonly(x, shapes):
    data = np.array(x, dtype=complex)
    if data.shape not in shapes:
        raise ValueError(f"expected shape in {shapes}, got {data.shape}")
    data.flags.writeable = False
    return data


def _hermitian_deviation(data):
    return max_abs(data - data.conj().T)


@dataclasses.dataclass(frozen=True, eq=False)
class StateVector:
    """ amplitudes in basis order |0>,|1> or |00>,|01>,|10>,|11> """
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _readonly(self.data, [(2,), (4,)]))

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    @property
    def dim(self):
        return len(self.data)

    @property
    def norm(self):
        return float(np.linalg.norm(self.data))

    def is_normalized(self, atol=UNITARY_ATOL):
        return abs(self.norm - 1) <= atol

    def normalized(self):
        if self.norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.data / self.norm)


@dataclasses.dataclass(frozen=True, eq=False)
class DensityMatrix:
    """ Hermitian 2x2 or 4x4 matrix; deviation=True relaxes trace and positivity """
    data: np.ndarray
    deviation: bool = False

    def __post_init__(self):
        data = _readonly(self.data, [(2, 2), (4, 4)])
        scale = max(1.0, max_abs(data))
        dev = _hermitian_deviation(data)
        if dev > UNITARY_ATOL * scale:
            raise ValueError(f"density matrix is not Hermitian, max deviation {dev:.3e}")
        if not self.deviation and abs(np.trace(data) - 1) > UNITARY_ATOL:
            raise ValueError(f"density matrix trace {np.trace(data).real:.12g} != 1")
        object.__setattr__(self, "data", data)

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    @property
    def dim(self):
        return len(self.data)

    @property
    def eigenvalues(self):
        return np.linalg.eigvalsh(self.data)


@dataclasses.dataclass(frozen=True)
class MeasurementRecord:
    qubit_index: int
    outcome: int
    probability: float
    collapsed: StateVector


def _as_array(x):
    return np.asarray(getattr(x, "data", x), dtype=complex)


def ket(bits):
    """
    >>> ket("01").data.real.tolist()
    [0.0, 1.0, 0.0, 0.0]
    """
    data = np.zeros(2 ** len(bits), dtype=complex)
    data[int(bits, 2)] = 1
    return StateVector(data)


def projector(state, deviation=False):
    v = _as_array(state)
    return DensityMatrix(np.outer(v, v.conj()), deviation=deviation)


def kron(A, B):
    """ Kronecker product with qubit 1 (A) most significant """
    a, b = _as_array(A), _as_array(B)
    if a.ndim != b.ndim or a.shape[0] != 2 or b.shape[0] != 2 or \
            any(n != 2 for n in a.shape + b.shape):
        raise ValueError(f"kron expects two single-qubit operands, got {a.shape} and {b.shape}")
    out = np.kron(a, b)
    if isinstance(A, StateVector) and isinstance(B, StateVector):
        return StateVector(out)
    if isinstance(A, DensityMatrix) and isinstance(B, DensityMatrix):
        return DensityMatrix(out, deviation=A.deviation or B.deviation)
    return out


def unitarity_deviation(U):
    U = _as_array(U)
    return max_abs(U.conj().T @ U - np.eye(len(U)))


def is_unitary(U, atol=UNITARY_ATOL):
    return unitarity_deviation(U) <= atol


@warn_nonfinite_output
def apply_unitary(U, s):
    """ U|s> for vectors, U rho U^dagger for density matrices """
    U = _as_array(U)
    dev = unitarity_deviation(U)
    if dev > UNITARY_ATOL:
        raise ValueError(f"operator is not unitary, max |U^dagger U - I| = {dev:.3e}")
    if U.shape[0] != s.dim:
        raise ValueError(f"dimension mismatch: U is {U.shape}, state has dim {s.dim}")
    if isinstance(s, StateVector):
        return StateVector(U @ s.data)
    out = U @ s.data @ U.conj().T
    return DensityMatrix((out + out.conj().T) / 2, deviation=s.deviation)


def partial_trace(rho, keep):
    """ reduce a two-qubit density matrix to the marginal of qubit `keep` """
    if rho.dim != 4:
        raise ValueError(f"partial_trace expects a two-qubit matrix, got dim {rho.dim}")
    t = rho.data.reshape(2, 2, 2, 2)
    if keep == 1:
        out = np.einsum("ijkj->ik", t)
    elif keep == 2:
        out = np.einsum("ijil->jl", t)
    else:
        raise ValueError(f"keep must be 1 or 2, got {keep}")
    return DensityMatrix(out, deviation=rho.deviation)


def _qubit_bits(qubit):
    if qubit not in (1, 2):
        raise ValueError(f"qubit must be 1 or 2, got {qubit}")
    return (np.arange(4) >> (2 - qubit)) & 1


def branch_probabilities(s, qubit):
    bits = _qubit_bits(qubit)
    weights = np.abs(_as_array(s)) ** 2
    return np.array([weights[bits == o].sum() for o in (0, 1)])


def project_measure(s, qubit, forced_outcome=None, rng=None):
    """ sigma_z measurement of one qubit; forced outcome or a sample from rng """
    if s.dim != 4:
        raise ValueError(f"project_measure expects a two-qubit state, got dim {s.dim}")
    if not s.is_normalized():
        raise ValueError(f"state is not normalized, norm={s.norm:.12g}")
    probs = branch_probabilities(s, qubit)

    if forced_outcome is None:
        if rng is None:
            raise ValueError("either forced_outcome or rng is required")
        outcome = int(rng.random() >= probs[0])
    else:
        outcome = int(forced_outcome)
        if outcome not in (0, 1):
            raise ValueError(f"outcome must be 0 or 1, got {forced_outcome}")
        if probs[outcome] < PROB_ATOL:
            raise ValueError(
                f"outcome {outcome} on qubit {qubit} has zero probability ({probs[outcome]:.3e})")

    projected = np.where(_qubit_bits(qubit) == outcome, s.data, 0)
    return MeasurementRecord(
        qubit, outcome, float(probs[outcome]),
        StateVector(projected / np.sqrt(probs[outcome])))


def purity(rho):
    return float(np.real(np.trace(rho.data @ rho.data)))


def check_physical(rho, eig_atol=EIG_ATOL, check_positivity=True):
    if rho.deviation:
        raise ValueError("deviation density matrices are not physical states")
    if check_positivity:
        lam = rho.eigenvalues.min()
        if lam < -eig_atol:
            raise ValueError(f"density matrix has negative eigenvalue {lam:.3e}")
    return rho


def _psd_sqrt(m):
    lam, vec = np.linalg.eigh(m)
    return (vec * np.sqrt(np.clip(lam, 0, None))) @ vec.conj().T


def fidelity(rho, sigma, check_positivity=True):
    """ Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2;
    <psi|rho|psi> when either argument is pure
    """
    check_physical(rho, check_positivity=check_positivity)
    check_physical(sigma, check_positivity=check_positivity)
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")

    for pure, other in [(sigma, rho), (rho, sigma)]:
        if abs(purity(pure) - 1) < UNITARY_ATOL:
            psi = np.linalg.eigh(pure.data)[1][:, -1]
            f = np.real(psi.conj() @ other.data @ psi)
            return float(np.clip(f, 0, 1))

    sr = _psd_sqrt(rho.data)
    inner = sr @ sigma.data @ sr
    lam = np.clip(np.linalg.eigvalsh((inner + inner.conj().T) / 2), 0, None)
    return float(np.clip(np.sqrt(lam).sum() ** 2, 0, 1))


def global_phase_overlap(u, v):
    """ |<u|v>|, insensitive to global phase """
    return float(abs(np.vdot(_as_array(u), _as_array(v))))


def effective_state(rho):
    """ physical state represented by a pseudopure deviation matrix:
    (rho - lambda_min I) / Tr(rho - lambda_min I)
    """
    data = _as_array(rho)
    lam = np.linalg.eigvalsh((data + data.conj().T) / 2)
    shifted = data - lam[0] * np.eye(len(data))
    tr = np.real(np.trace(shifted))
    if tr <= UNITARY_ATOL * max(1.0, max_abs(data)):
        raise ValueError("deviation matrix carries no polarization")
    return DensityMatrix(shifted / tr)

