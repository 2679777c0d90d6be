import numpy as np, pandas as pd
import numba, collections, dataclasses, functools, itertools
from typing import Dict, Tuple, Union
from ..util import PROB_ATOL, timed
from .chc import Bb84Label, apply_chc, condense, truth_table_array
from ..util.qlin import branch_probabilities


MAX_ROUNDS = 8
KNOWLEDGE_SETS = ("none", "control", "target", "all")


@dataclasses.dataclass(frozen=True)
class KnowledgeModel:
    """ which inputs of the (rounds + 1)-long sequence the adversary knows;
    sequence index 0 is the first control, 1.. are the successive targets
    """
    knows_inputs: Union[str, Tuple[int, ...]] = "none"
    knows_outcomes: bool = False

    def known_indices(self, length):
        spec = self.knows_inputs
        if isinstance(spec, str):
            if spec not in KNOWLEDGE_SETS:
                raise ValueError(f"unknown knows_inputs {spec!r}, expected one of {KNOWLEDGE_SETS}")
            return {
                "none": (),
                "control": (0,),
                "target": tuple(range(1, length)),
                "all": tuple(range(length)),
            }[spec]
        idx = tuple(sorted(set(int(i) for i in spec)))
        if any(i < 0 or i >= length for i in idx):
            raise ValueError(f"knows_inputs {spec} out of range for sequence length {length}")
        return idx

    @property
    def name(self):
        inputs = self.knows_inputs if isinstance(self.knows_inputs, str) \
            else "+".join(map(str, self.knows_inputs))
        return f"inputs={inputs},outcomes={self.knows_outcomes}"


@dataclasses.dataclass
class LeakageReport:
    rounds: int
    guess_probability: float
    distribution: Dict[str, float]
    method: str = "exhaustive-enumeration"
    path: str = "table"
    model: KnowledgeModel = None


@functools.lru_cache(None)
def outcome_distribution(phi1, phi2):
    """ {(outcome, condensed label): probability} from the CHC output amplitudes """
    joint = apply_chc(Bb84Label(phi1), Bb84Label(phi2))
    out = {}
    for o, p in enumerate(branch_probabilities(joint, 2)):
        if p < PROB_ATOL:
            continue
        res = condense(joint, o)
        assert res.condensed_label is not None, "BB84 inputs must condense to a BB84 state"
        out[(o, res.condensed_label)] = float(p)
    return out


@numba.jit(nopython=True)
def _enumerate_counts_numba(table, n_rounds, outer_pos, inner_pos, bases):
    """ digits[0..n_rounds] are input labels, digits[n_rounds+1..] outcomes;
    returns (sum over outer states of the MAP count, label counts)
    """
    n_outer = 1
    for p in outer_pos:
        n_outer *= bases[p]
    n_inner = 1
    for p in inner_pos:
        n_inner *= bases[p]

    digits = np.zeros(len(bases), dtype=np.int64)
    counts = np.zeros(4, dtype=np.int64)
    local = np.zeros(4, dtype=np.int64)
    best = 0
    for k in range(n_outer):
        rem = k
        for p in outer_pos:
            digits[p] = rem % bases[p]
            rem //= bases[p]
        local[:] = 0
        for u in range(n_inner):
            rem = u
            for p in inner_pos:
                digits[p] = rem % bases[p]
                rem //= bases[p]
            label = digits[0]
            for r in range(n_rounds):
                label = table[digits[n_rounds + 1 + r], label, digits[r + 1]]
            local[label] += 1
        best += local[np.argmax(local)]
        counts += local
    return best, counts


def _guess_by_table(known, knows_outcomes, rounds):
    n = rounds + 1
    bases = np.array([4] * n + [2] * rounds, dtype=np.int64)
    outer = list(known) + (list(range(n, n + rounds)) if knows_outcomes else [])
    inner = [p for p in range(len(bases)) if p not in outer]

    best, counts = _enumerate_counts_numba(
        truth_table_array().astype(np.int64), rounds,
        np.array(outer, dtype=np.int64), np.array(inner, dtype=np.int64), bases)
    total = float(np.prod(bases.astype(float)))
    return best / total, counts / total


def _guess_by_algebra(known, knows_outcomes, rounds):
    n = rounds + 1
    joint = collections.defaultdict(lambda: np.zeros(4))
    for inputs in itertools.product(Bb84Label, repeat=n):
        branches = [((), inputs[0], 4.0 ** -n)]
        for target in inputs[1:]:
            branches = [
                (outs + (o,), label, w * p)
                for outs, control, w in branches
                for (o, label), p in outcome_distribution(control, target).items()
            ]
        for outs, label, w in branches:
            key = (tuple(inputs[i] for i in known), outs if knows_outcomes else ())
            joint[key][label.index] += w

    guess = sum(local[np.argmax(local)] for local in joint.values())
    return float(guess), np.sum(list(joint.values()), axis=0)


def guess_probability(model, rounds, method="table"):
    """ exact MAP success probability of guessing the final condensed label
    under i.i.d. uniform BB84 inputs; method is "table" or "algebra"
    """
    if not 1 <= rounds <= MAX_ROUNDS:
        raise ValueError(f"rounds must be in [1, {MAX_ROUNDS}], got {rounds}")
    known = model.known_indices(rounds + 1)
    fn = {"table": _guess_by_table, "algebra": _guess_by_algebra}.get(method)
    if fn is None:
        raise ValueError(f"unknown method {method!r}")

    with timed(f"guess_probability {model.name} rounds={rounds} via {method}"):
        guess, dist = fn(known, model.knows_outcomes, rounds)

    assert abs(dist.sum() - 1) < 1e-12, "label distribution must normalize"
    return LeakageReport(
        rounds, guess,
        {str(label): float(dist[label.index]) for label in Bb84Label},
        path=method, model=model)


def leakage_curve(model, max_rounds, method="table"):
    if not 1 <= max_rounds <= MAX_ROUNDS:
        raise ValueError(f"max_rounds must be in [1, {MAX_ROUNDS}], got {max_rounds}")
    return [guess_probability(model, r, method) for r in range(1, max_rounds + 1)]


def leakage_frame(reports):
    return pd.DataFrame([
        {"rounds": r.rounds, "guess_probability": r.guess_probability,
         **{f"p({k})": v for k, v in r.distribution.items()}}
        for r in reports
    ])
