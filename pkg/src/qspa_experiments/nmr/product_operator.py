import numpy as np, pandas as pd
import dataclasses, functools
from typing import Dict
from ..util import UNITARY_ATOL, max_abs
from .spin_system import spin_operator


AXES = ("x", "y", "z")
PRODUCT_OPERATOR_LABELS = (
    ("E", "Ix1", "Iy1", "Iz1", "Ix2", "Iy2", "Iz2")
    + tuple(f"2I{a}1I{b}2" for a in AXES for b in AXES)
)


@functools.lru_cache(None)
def product_operator_basis():
    """ {label: 4x4 matrix}, each of Hilbert-Schmidt norm 1 except E (norm 4) """
    out = {"E": np.eye(4, dtype=complex)}
    for k in (1, 2):
        for a in AXES:
            out[f"I{a}{k}"] = spin_operator(a, k)
    for a in AXES:
        for b in AXES:
            out[f"2I{a}1I{b}2"] = 2 * spin_operator(a, 1) @ spin_operator(b, 2)
    for m in out.values():
        m.flags.writeable = False
    return out


@dataclasses.dataclass(frozen=True)
class ProductOperatorExpansion:
    coefficients: Dict[str, float]

    def __getitem__(self, label):
        return self.coefficients[label]

    def matrix(self):
        basis = product_operator_basis()
        return sum(c * basis[k] for k, c in self.coefficients.items())

    def scaled(self, factor):
        return ProductOperatorExpansion({k: c * factor for k, c in self.coefficients.items()})

    def max_deviation(self, expected):
        """ max coefficient difference against a sparse {label: value} map """
        return max(abs(c - expected.get(k, 0.0)) for k, c in self.coefficients.items())

    def to_series(self):
        return pd.Series(self.coefficients)

    def format(self, atol=1e-9):
        """
        >>> ProductOperatorExpansion({"Iz1": 1.0, "Iz2": 2.0}).format()
        'Iz1 + 2 Iz2'
        """
        terms = []
        for label in PRODUCT_OPERATOR_LABELS:
            c = self.coefficients.get(label, 0.0)
            name = label
            if label.startswith("2"):
                c, name = 2 * c, label[1:]
            if abs(c) <= atol:
                continue
            mag = "" if abs(abs(c) - 1) <= atol else f"{abs(c):.6g} "
            sign = "-" if c < 0 else "+"
            terms.append((sign, mag + name))

        if not terms:
            return "0"
        head_sign, head = terms[0]
        out = ("-" if head_sign == "-" else "") + head
        return " ".join([out] + [f"{s} {t}" for s, t in terms[1:]])


def product_operator_expand(rho):
    """ c_B = Tr(B^dagger rho) / Tr(B^dagger B) over the 16-element basis """
    data = np.asarray(getattr(rho, "data", rho), dtype=complex)
    if data.shape != (4, 4):
        raise ValueError(f"product_operator_expand expects a 4x4 matrix, got {data.shape}")

    coef = {}
    scale = max(1.0, max_abs(data))
    for label, B in product_operator_basis().items():
        c = np.trace(B.conj().T @ data) / np.real(np.trace(B.conj().T @ B))
        assert abs(c.imag) <= UNITARY_ATOL * scale, f"complex coefficient for {label}: {c}"
        coef[label] = float(c.real)
    return ProductOperatorExpansion(coef)
