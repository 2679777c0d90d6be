import numpy as np
import functools, time, contextlib, warnings


# unitarity / hermiticity checks
UNITARY_ATOL = 1e-10
# exact-algebra assertions
EXACT_ATOL = 1e-12
# eigenvalue floor for physical states
EIG_ATOL = 1e-9
# nearest-BB84 matching
LABEL_ATOL = 1e-8
# gate <-> pulse verdicts
EQUIV_ATOL = 1e-8
# zero-probability branches
PROB_ATOL = 1e-12


class timed(contextlib.ContextDecorator):
    def __init__(self, name=""):
        self.name = name

    def __enter__(self):
        self.tic = time.time()
        print("entering", self.name)

    def __exit__(self, *args, **kw):
        print("exiting", self.name, "time {:.1f}s".format(time.time() - self.tic))


def warn_nonfinite_output(func):
    @functools.wraps(func)
    def wrapped(*args, **kw):
        out = func(*args, **kw)
        values = getattr(out, "data", out)

        if isinstance(values, np.ndarray) and not np.isfinite(values).all():
            warnings.warn(f"{func.__name__} output contains NaN or Inf", stacklevel=2)
        return out
    return wrapped


def max_abs(x):
    x = np.asarray(x)
    return float(np.abs(x).max()) if x.size else 0.0


def format_pi_fraction(angle, max_denominator=64, atol=1e-12):
    """
    >>> format_pi_fraction(np.pi / 2), format_pi_fraction(-2 * np.pi / 3)
    ('pi/2', '-2pi/3')
    """
    from fractions import Fraction
    frac = Fraction(angle / np.pi).limit_denominator(max_denominator)
    if abs(float(frac) * np.pi - angle) > atol:
        return repr(float(angle))
    if frac == 0:
        return "0"
    sign = "-" if frac < 0 else ""
    num, den = abs(frac.numerator), frac.denominator
    head = "pi" if num == 1 else f"{num}pi"
    return sign + head + (f"/{den}" if den != 1 else "")
