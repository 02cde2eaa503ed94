"""Indistinguishability checks over finite mechanisms and game transcripts.

Epsilons here live on the natural-log scale (the definitions bound ratios by
exp(eps)), unlike the entropic modules which report bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import FiniteMechanism, JointDistribution, _load_json
from .errors import (
    DomainError,
    EmptyError,
    ParamError,
    SchemaError,
    ShapeError,
)

WILSON_Z95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class NeighborRelation:
    """Pairs of mechanism inputs that count as neighboring data sets."""

    pairs: tuple[tuple[str, str], ...]

    @classmethod
    def of(cls, pairs: Sequence[Sequence[str]]):
        return cls(tuple((str(a), str(b)) for a, b in pairs))

    def ordered_pairs(self) -> list[tuple[str, str]]:
        """Both directions of every pair (the symmetric closure)."""
        out = []
        for a, b in self.pairs:
            out.append((a, b))
            out.append((b, a))
        return out


def parse_neighbor_relation(text: str) -> NeighborRelation:
    obj = _load_json(text, "neighbor relation")
    if not isinstance(obj, dict) or set(obj) != {"pairs"}:
        raise SchemaError('neighbor file must be {"pairs": [[id, id], ...]}')
    pairs = []
    for p in obj["pairs"]:
        if not isinstance(p, list) or len(p) != 2:
            raise SchemaError("each neighbor pair must be a two-element array")
        pairs.append(p)
    return NeighborRelation.of(pairs)


def _check_inputs(m: FiniteMechanism, nr: NeighborRelation):
    known = set(m.inputs)
    for a, b in nr.pairs:
        for x in (a, b):
            if x not in known:
                raise SchemaError(f"neighbor relation names unknown input {x!r}")


def dp_epsilon(m: FiniteMechanism, nr: NeighborRelation) -> dict:
    """Smallest eps such that the mechanism is eps-differentially private.

    For finite output alphabets the per-output ratio bound over singletons is
    equivalent to the bound over all output sets, so the scan covers single
    outputs only. Disjoint support across a neighbor pair gives +inf.
    """
    _check_inputs(m, nr)
    eps = 0.0
    for a, b in nr.ordered_pairs():
        pa = m.row_for(a).probs
        pb = m.row_for(b).probs
        for va, vb in zip(pa, pb):
            if va == 0 and vb == 0:
                continue
            if va == 0 or vb == 0:
                return {"eps_eff": math.inf}
            eps = max(eps, abs(math.log(va / vb)))
    return {"eps_eff": eps}


def adp_delta(m: FiniteMechanism, nr: NeighborRelation, eps: float) -> float:
    """Minimal additive slack delta making the mechanism (eps, delta)-private.

    delta = max over ordered neighbor pairs of the total mass by which one
    row exceeds exp(eps) times the other. At eps = 0 this is the worst-case
    total variation distance.
    """
    if eps < 0 or math.isnan(eps):
        raise ParamError(f"eps must be >= 0, got {eps!r}")
    _check_inputs(m, nr)
    scale = math.exp(eps)
    delta = 0.0
    for a, b in nr.ordered_pairs():
        pa = m.row_for(a).probs
        pb = m.row_for(b).probs
        excess = math.fsum(max(0.0, va - scale * vb) for va, vb in zip(pa, pb))
        delta = max(delta, excess)
    return delta


@dataclass(frozen=True)
class GeoMechanism:
    """A location-reporting mechanism plus the coordinates of its inputs."""

    locations: tuple[tuple[str, float, float], ...]
    mechanism: FiniteMechanism

    def __post_init__(self):
        ids = [loc[0] for loc in self.locations]
        if len(set(ids)) != len(ids):
            raise SchemaError("location ids must be distinct")
        if tuple(ids) != self.mechanism.inputs:
            raise ShapeError("mechanism inputs must match the location ids in order")
        for _, x, y in self.locations:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise SchemaError("coordinates must be finite")


def parse_geo_mechanism(text: str) -> GeoMechanism:
    obj = _load_json(text, "geo mechanism")
    keys = {"locations", "outputs", "matrix"}
    if not isinstance(obj, dict) or set(obj) != keys:
        raise SchemaError(
            'geo file must be {"locations": [[id, x, y], ...], "outputs": [...], "matrix": [[...]]}'
        )
    locations = tuple(
        (str(e[0]), float(e[1]), float(e[2])) for e in obj["locations"]
    )
    mech = FiniteMechanism.from_matrix(
        obj["matrix"], [loc[0] for loc in locations], obj["outputs"]
    )
    return GeoMechanism(locations, mech)


def geo_indistinguishability(g: GeoMechanism) -> dict:
    """Worst output log-ratio per unit of distance between location pairs.

    Coincident locations with differing output rows force +inf.
    """
    if len(g.locations) < 2:
        raise ParamError("need at least two locations")
    eps = 0.0
    for i in range(len(g.locations)):
        for j in range(i + 1, len(g.locations)):
            ida, xa, ya = g.locations[i]
            idb, xb, yb = g.locations[j]
            d = math.hypot(xa - xb, ya - yb)
            pa = g.mechanism.row_for(ida).probs
            pb = g.mechanism.row_for(idb).probs
            for va, vb in zip(pa, pb):
                if va == 0 and vb == 0:
                    continue
                if va == 0 or vb == 0:
                    return {"eps_eff": math.inf}
                ratio = abs(math.log(va / vb))
                if ratio == 0:
                    continue
                if d == 0:
                    return {"eps_eff": math.inf}
                eps = max(eps, ratio / d)
    return {"eps_eff": eps}


def information_privacy(j: JointDistribution, eps: float) -> dict:
    """Bound on how far any posterior p(s|u) drifts from the prior p(s).

    The joint is over (sensitive value, observed output); rows with zero
    prior are skipped, and a vanishing posterior against a positive prior
    makes the bound infinite.
    """
    if eps < 0 or math.isnan(eps):
        raise ParamError(f"eps must be >= 0, got {eps!r}")
    p_s = j.marginal_x().probs
    p_u = j.marginal_y().probs
    eps_min = 0.0
    for si, ps in enumerate(p_s):
        if ps == 0:
            continue
        for ui, pu in enumerate(p_u):
            if pu == 0:
                continue
            posterior = j.matrix[si][ui] / pu
            if posterior == 0:
                eps_min = math.inf
            else:
                eps_min = max(eps_min, abs(math.log(posterior / ps)))
    return {"holds": eps_min <= eps, "eps_min": eps_min}


def distributional_privacy(
    likelihood_1: float, likelihood_2: float, prior_ratio: float, eps: float
) -> bool:
    """Whether the posterior odds between two generating parameter sets stay
    within exp(eps).

    A vanishing second likelihood against a positive first makes the odds
    infinite, failing every finite eps.
    """
    if likelihood_1 < 0 or likelihood_2 < 0:
        raise ParamError("likelihoods must be >= 0")
    if prior_ratio < 0:
        raise ParamError("prior ratio must be >= 0")
    if eps < 0 or math.isnan(eps):
        raise ParamError(f"eps must be >= 0, got {eps!r}")
    if likelihood_1 == 0 and likelihood_2 == 0:
        raise DomainError("both likelihoods are 0; posterior undefined")
    if likelihood_2 == 0:
        return False
    return prior_ratio * likelihood_1 / likelihood_2 <= math.exp(eps)


@dataclass(frozen=True)
class GameTranscript:
    """Guess/truth outcomes of repeated challenge-response trials."""

    trials: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.trials:
            raise EmptyError("transcript needs at least one trial")
        for g, t in self.trials:
            if g not in (0, 1) or t not in (0, 1):
                raise SchemaError("guesses and truths must be 0 or 1")

    def fraction_correct(self) -> float:
        return sum(1 for g, t in self.trials if g == t) / len(self.trials)


def parse_game_transcript(text: str) -> GameTranscript:
    obj = _load_json(text, "game transcript")
    if not isinstance(obj, list):
        raise SchemaError('transcript must be a JSON list of {"guess": ..., "truth": ...}')
    trials = []
    for e in obj:
        if not isinstance(e, dict) or set(e) != {"guess", "truth"}:
            raise SchemaError('each trial must be {"guess": 0/1, "truth": 0/1}')
        trials.append((int(e["guess"]), int(e["truth"])))
    return GameTranscript(tuple(trials))


def wilson_interval(successes: int, n: int, z: float = WILSON_Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (robust at small n)."""
    if n < 1:
        raise EmptyError("need at least one trial")
    f = successes / n
    denom = 1.0 + z * z / n
    center = (f + z * z / (2 * n)) / denom
    half = z * math.sqrt(f * (1 - f) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def game_advantage(g: GameTranscript, eps_threshold: float) -> dict:
    """Adversary's edge over random guessing, with a 95% confidence interval.

    ``holds`` is the conservative verdict: even the interval's upper end
    stays within 1/2 + eps_threshold.
    """
    n = len(g.trials)
    correct = sum(1 for guess, truth in g.trials if guess == truth)
    f = correct / n
    lo, hi = wilson_interval(correct, n)
    return {
        "advantage": max(0.0, f - 0.5),
        "ci95": (lo, hi),
        "holds": hi <= 0.5 + eps_threshold,
    }


def unconditional_privacy(g: GameTranscript) -> dict:
    """Zero-advantage variant: the transcript shows no edge at all."""
    advantage = max(0.0, g.fraction_correct() - 0.5)
    return {"holds": advantage == 0.0, "advantage": advantage}
