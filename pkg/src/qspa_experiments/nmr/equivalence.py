import numpy as np, scipy as sp
import scipy.optimize
import dataclasses, itertools
from typing import List
from ..util import UNITARY_ATOL, EQUIV_ATOL, max_abs, timed
from ..util.qlin import unitarity_deviation


FREEDOMS = ("global-only", "global-plus-z")


@dataclasses.dataclass
class EquivalenceResult:
    verdict: bool
    fitted_phases: List[float]
    max_deviation: float

    def __bool__(self):
        return self.verdict


def _wrap(angle):
    return float(np.angle(np.exp(1j * angle)))


def z_phases(alpha, beta):
    """ diag(e^{i alpha z1 / 2}) x diag(e^{i beta z2 / 2}) """
    return np.kron(np.diag(np.exp([0.5j * alpha, -0.5j * alpha])),
                   np.diag(np.exp([0.5j * beta, -0.5j * beta])))


def _dressed(V, p):
    return z_phases(p[0], p[1]) @ V @ z_phases(p[2], p[3])


def _global_phase(U, W):
    return float(np.angle(np.trace(W.conj().T @ U)))


def _fit_z_phases(U, V, grid=8):
    """ coarse grid over (alpha_post, beta_post, alpha_pre, beta_pre), then polish
    the complex residual U - e^{i phi} Z_post V Z_pre by least squares
    """
    def overlap(p):
        return abs(np.trace(_dressed(V, p).conj().T @ U))

    axis = np.linspace(-np.pi, np.pi, grid, endpoint=False)
    start = max(itertools.product(axis, repeat=4), key=overlap)
    start = [_global_phase(U, _dressed(V, start))] + list(start)

    def residual(x):
        r = (U - np.exp(1j * x[0]) * _dressed(V, x[1:])).ravel()
        return np.concatenate([r.real, r.imag])

    coarse = sp.optimize.minimize(lambda x: np.sum(residual(x) ** 2), start,
                                  method="Nelder-Mead",
                                  options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 20000})
    fine = sp.optimize.least_squares(residual, coarse.x, method="lm",
                                     xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return fine.x


def equivalent_up_to_phase(U, V, freedoms="global-only", atol=EQUIV_ATOL):
    """ fit U ~ e^{i phi} Z_post V Z_pre; fitted_phases is [phi] for global-only
    and [phi, alpha_post, beta_post, alpha_pre, beta_pre] for global-plus-z
    """
    U, V = np.asarray(U, dtype=complex), np.asarray(V, dtype=complex)
    for name, M in [("U", U), ("V", V)]:
        if M.shape != (4, 4):
            raise ValueError(f"{name} must be 4x4, got {M.shape}")
        dev = unitarity_deviation(M)
        if dev > UNITARY_ATOL:
            raise ValueError(f"{name} is not unitary, max |M^dagger M - I| = {dev:.3e}")

    if freedoms == "global-only":
        phases = [_global_phase(U, V)]
        fitted = np.exp(1j * phases[0]) * V
    elif freedoms == "global-plus-z":
        with timed("equivalent_up_to_phase global-plus-z fit"):
            x = _fit_z_phases(U, V)
        phases = [_wrap(a) for a in x]
        fitted = np.exp(1j * x[0]) * _dressed(V, x[1:])
    else:
        raise ValueError(f"unknown freedoms {freedoms!r}, expected one of {FREEDOMS}")

    dev = max_abs(U - fitted)
    return EquivalenceResult(bool(dev < atol), phases, dev)
