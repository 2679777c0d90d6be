""" line-oriented pulse sequence files:

    # comment
    rot spins=12 axis=-x angle=pi/2
    delay t=1/(4J)
    grad z
"""
import numpy as np
import re
from fractions import Fraction
from ..util import format_pi_fraction
from .pulses import Rotation, Delay, GradientZ, PulseSequence, SYMBOLIC_DELAYS


_PI_FRACTION = re.compile(r"^(-)?(\d+)?pi(?:/(\d+))?$")


class PulseSyntaxError(ValueError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _dump_event(e):
    if isinstance(e, Rotation):
        angle = format_pi_fraction(e.angle, atol=0)
        return f"rot spins={''.join(map(str, e.spins))} axis={e.axis} angle={angle}"
    if isinstance(e, Delay):
        t = e.duration if isinstance(e.duration, str) else repr(e.duration)
        return f"delay t={t}"
    return "grad z"


def dumps_sequence(seq):
    head = [f"# {seq.label}"] if seq.label else []
    return "\n".join(head + [_dump_event(e) for e in seq]) + "\n"


def _parse_angle(text):
    m = _PI_FRACTION.match(text)
    if m:
        sign, num, den = m.groups()
        if den is not None and int(den) == 0:
            raise ValueError(f"zero denominator in angle {text!r}")
        value = float(Fraction(int(num or 1), int(den or 1))) * np.pi
        return -value if sign else value
    return float(text)


def _parse_fields(lineno, tokens, keys):
    fields = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep or key not in keys or key in fields:
            raise PulseSyntaxError(lineno, f"unexpected token {tok!r}")
        fields[key] = value
    missing = [k for k in keys if k not in fields]
    if missing:
        raise PulseSyntaxError(lineno, f"missing {', '.join(missing)}")
    return fields


def _parse_line(lineno, tokens):
    kind, rest = tokens[0], tokens[1:]
    try:
        if kind == "rot":
            f = _parse_fields(lineno, rest, ("spins", "axis", "angle"))
            if f["spins"] not in ("1", "2", "12"):
                raise PulseSyntaxError(lineno, f"unknown spins {f['spins']!r}")
            return Rotation(tuple(int(c) for c in f["spins"]), f["axis"], _parse_angle(f["angle"]))
        if kind == "delay":
            t = _parse_fields(lineno, rest, ("t",))["t"]
            return Delay(t if t in SYMBOLIC_DELAYS else float(t))
        if kind == "grad":
            if rest != ["z"]:
                raise PulseSyntaxError(lineno, f"expected 'grad z', got {' '.join(tokens)!r}")
            return GradientZ()
    except PulseSyntaxError:
        raise
    except ValueError as e:
        raise PulseSyntaxError(lineno, str(e)) from e
    raise PulseSyntaxError(lineno, f"unknown event {kind!r}")


def loads_sequence(text, label=""):
    events = []
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            if not events and not label and line.strip().startswith("#"):
                label = line.strip()[1:].strip()
            continue
        events.append(_parse_line(lineno, body.split()))
    return PulseSequence(events, label)


def load_sequence(path):
    with open(path) as fp:
        return loads_sequence(fp.read())
