"""One compute entry per implemented catalog metric.

Each entry knows how to turn input files plus ``key=value`` parameters into a
library call and wraps the result in a MetricValue carrying the catalog unit.
The fixture files under ``fixtures/`` document the concrete input shape for
every metric.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from . import adversary, indist, infogain, registry, tabular, uncertainty
from .core import (
    DiscreteDistribution,
    MetricValue,
    _load_json,
    parse_distribution,
    parse_joint,
    parse_mechanism,
    parse_region,
    parse_table,
    parse_trace,
)
from .errors import ParamError, SchemaError


# ---------------------------------------------------------------------------
# Parameter and file helpers


def _param(params: dict, name: str, default=None, required: bool = False):
    if name in params:
        return params[name]
    if required:
        raise ParamError(f"missing required parameter {name!r}")
    return default


def p_float(params: dict, name: str, default: float | None = None) -> float:
    raw = _param(params, name, default, required=default is None)
    if isinstance(raw, (int, float)):
        return float(raw)
    if isinstance(raw, str) and raw.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise ParamError(f"parameter {name!r} must be a number, got {raw!r}")


def p_int(params: dict, name: str, default: int | None = None) -> int:
    raw = _param(params, name, default, required=default is None)
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise ParamError(f"parameter {name!r} must be an integer, got {raw!r}")


def p_str(params: dict, name: str, default: str | None = None) -> str:
    raw = _param(params, name, default, required=default is None)
    return str(raw)


def p_list(params: dict, name: str, default=None) -> list:
    raw = _param(params, name, default, required=default is None)
    if isinstance(raw, list):
        return raw
    try:
        value = json.loads(raw)
    except (TypeError, json.JSONDecodeError):
        raise ParamError(f"parameter {name!r} must be a JSON array, got {raw!r}")
    if not isinstance(value, list):
        raise ParamError(f"parameter {name!r} must be a JSON array")
    return value


def _read(path: str | Path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}")


def _json_file(path: str | Path, keys: set[str], optional: set[str] = frozenset()):
    obj = _load_json(_read(path), Path(path).name)
    if not isinstance(obj, dict) or not keys <= set(obj) or not set(obj) <= keys | optional:
        raise SchemaError(f"{Path(path).name}: expected JSON object with keys {sorted(keys)}")
    return obj


def _need(paths: Sequence[str], n: int, what: str):
    if len(paths) != n:
        raise ParamError(f"expected {n} input file(s) ({what}), got {len(paths)}")


def _table_from(paths: Sequence[str], schema_path: str | None):
    _need(paths, 1, "table CSV")
    if schema_path is None:
        raise ParamError("table metrics need --schema with the role/kind sidecar")
    schema = _load_json(_read(schema_path), "schema sidecar")
    return parse_table(_read(paths[0]), schema)


def _table_spec(entry: dict, base: Path):
    csv_text = _read(base / entry["csv_path"])
    return parse_table(
        csv_text, {"roles": entry.get("roles", {}), "kinds": entry.get("kinds", {})}
    )


def _dist(paths: Sequence[str], i: int = 0) -> DiscreteDistribution:
    return parse_distribution(_read(paths[i]))


def _partition_dist(path: str) -> uncertainty.PartitionDistribution:
    obj = _json_file(path, {"partitions"})
    parts, probs = [], []
    for entry in obj["partitions"]:
        if not isinstance(entry, dict) or set(entry) != {"blocks", "prob"}:
            raise SchemaError('each partition must be {"blocks": [[...]], "prob": ...}')
        parts.append(uncertainty.make_partition(entry["blocks"]))
        probs.append(float(entry["prob"]))
    return uncertainty.PartitionDistribution(tuple(parts), tuple(probs))


# ---------------------------------------------------------------------------
# Entry table


@dataclass(frozen=True)
class ComputeEntry:
    fn: Callable[[Sequence[str], str | None, dict], object]
    inputs_help: str


_ENTRIES: dict[str, ComputeEntry] = {}


def _entry(metric_id: str, inputs_help: str):
    def register(fn):
        _ENTRIES[metric_id] = ComputeEntry(fn, inputs_help)
        return fn

    return register


# --- uncertainty -----------------------------------------------------------


@_entry("anonymity_set_size", '{"members": [...]}')
def _(paths, schema, params):
    _need(paths, 1, "member set")
    return uncertainty.anonymity_set_size(set(_json_file(paths[0], {"members"})["members"]))


@_entry("entropy", "distribution JSON")
def _(paths, schema, params):
    _need(paths, 1, "distribution")
    return uncertainty.shannon_entropy(_dist(paths))


@_entry("renyi_entropy", "distribution JSON; --param alpha=...")
def _(paths, schema, params):
    _need(paths, 1, "distribution")
    return uncertainty.renyi_entropy(_dist(paths), p_float(params, "alpha"))


@_entry("max_entropy", "distribution JSON")
def _(paths, schema, params):
    _need(paths, 1, "distribution")
    return uncertainty.max_entropy(_dist(paths))


@_entry("min_entropy", "distribution JSON")
def _(paths, schema, params):
    _need(paths, 1, "distribution")
    return uncertainty.min_entropy(_dist(paths))


@_entry("normalized_entropy", "distribution JSON")
def _(paths, schema, params):
    _need(paths, 1, "distribution")
    return uncertainty.normalized_entropy(_dist(paths))


@_entry("asymmetric_entropy", "distribution JSON; --param w=[...]")
def _(paths, schema, params):
    _need(paths, 1, "distribution")
    w = [float(v) for v in p_list(params, "w")]
    return uncertainty.asymmetric_entropy(_dist(paths), w)


@_entry("quantile_entropy", "distribution JSON; --param c=...")
def _(paths, schema, params):
    _need(paths, 1, "distribution")
    return uncertainty.quantile_entropy(_dist(paths), p_float(params, "c"))


@_entry("conditional_entropy", "joint distribution JSON")
def _(paths, schema, params):
    _need(paths, 1, "joint distribution")
    return uncertainty.conditional_entropy(parse_joint(_read(paths[0])))


@_entry("normalized_conditional_entropy", "joint distribution JSON")
def _(paths, schema, params):
    _need(paths, 1, "joint distribution")
    return uncertainty.conditional_entropy(parse_joint(_read(paths[0])), normalized=True)


@_entry("inherent_privacy", "distribution JSON")
def _(paths, schema, params):
    _need(paths, 1, "distribution")
    return uncertainty.inherent_privacy(uncertainty.shannon_entropy(_dist(paths)))


@_entry("conditional_privacy", "joint distribution JSON")
def _(paths, schema, params):
    _need(paths, 1, "joint distribution")
    h = uncertainty.conditional_entropy(parse_joint(_read(paths[0])))
    return uncertainty.inherent_privacy(h)


@_entry("cross_entropy", "true distribution JSON, model distribution JSON")
def _(paths, schema, params):
    _need(paths, 2, "two distributions")
    return uncertainty.cross_entropy(_dist(paths, 0), _dist(paths, 1))


@_entry("degree_of_unlinkability", '{"partitions": [...]} (posterior[, prior])')
def _(paths, schema, params):
    if len(paths) not in (1, 2):
        raise ParamError("expected posterior partitions and optionally prior partitions")
    posterior = _partition_dist(paths[0])
    prior = _partition_dist(paths[1]) if len(paths) == 2 else None
    return uncertainty.unlinkability_degree(posterior, prior)


@_entry("entropy_bayes", '{"states", "prior", "transition", "likelihoods"}')
def _(paths, schema, params):
    _need(paths, 1, "tracking model")
    obj = _json_file(paths[0], {"states", "prior", "transition", "likelihoods"})
    states = tuple(str(s) for s in obj["states"])
    model = uncertainty.BayesTrackingModel(
        states,
        DiscreteDistribution(states, tuple(float(p) for p in obj["prior"])),
        tuple(tuple(float(v) for v in row) for row in obj["transition"]),
        tuple(tuple(float(v) for v in row) for row in obj["likelihoods"]),
    )
    return {"series": uncertainty.bayes_entropy_series(model)}


@_entry("cumulative_entropy", '{"values": [...]} (bits per mix zone)')
def _(paths, schema, params):
    _need(paths, 1, "zone entropies")
    return uncertainty.cumulative_entropy(
        [float(v) for v in _json_file(paths[0], {"values"})["values"]]
    )


@_entry("genomic_privacy", '{"probs": [...], "weights": [...]}')
def _(paths, schema, params):
    _need(paths, 1, "variation probabilities")
    obj = _json_file(paths[0], {"probs", "weights"})
    return uncertainty.genomic_privacy(
        [float(v) for v in obj["probs"]], [float(v) for v in obj["weights"]]
    )


@_entry("protection_level", '{"regions": [dist, ...]}, reference distribution; --param t_common=N')
def _(paths, schema, params):
    _need(paths, 2, "trajectory regions and reference")
    obj = _json_file(paths[0], {"regions"})
    regions = [
        DiscreteDistribution(
            tuple(str(s) for s in r["labels"]), tuple(float(p) for p in r["probs"])
        )
        for r in obj["regions"]
    ]
    return uncertainty.protection_level(regions, _dist(paths, 1), p_int(params, "t_common"))


@_entry("user_centric_privacy", "--param h0=... lam=... t=... [t_last=0]")
def _(paths, schema, params):
    _need(paths, 0, "parameters only")
    spec = uncertainty.DecaySpec(
        p_float(params, "h0"), p_float(params, "lam"), p_float(params, "t_last", 0.0)
    )
    return uncertainty.user_centric_privacy(spec, p_float(params, "t"))


# --- information gain ------------------------------------------------------


@_entry("leaked_information", '{"items": [...]}')
def _(paths, schema, params):
    _need(paths, 1, "leaked items")
    return infogain.leaked_count(set(_json_file(paths[0], {"items"})["items"]))


@_entry("relative_entropy", "true distribution JSON, estimate distribution JSON")
def _(paths, schema, params):
    _need(paths, 2, "two distributions")
    return infogain.kl_divergence(_dist(paths, 0), _dist(paths, 1))


@_entry("mutual_information", "joint distribution JSON")
def _(paths, schema, params):
    _need(paths, 1, "joint distribution")
    return infogain.mutual_information(parse_joint(_read(paths[0])))["mi"]


@_entry("normalized_mutual_information", "joint distribution JSON")
def _(paths, schema, params):
    _need(paths, 1, "joint distribution")
    return infogain.mutual_information(parse_joint(_read(paths[0])))["nmi"]


@_entry("conditional_privacy_loss", "joint distribution JSON")
def _(paths, schema, params):
    _need(paths, 1, "joint distribution")
    return infogain.mutual_information(parse_joint(_read(paths[0])))["cpl"]


@_entry("conditional_mutual_information", '{"tensor": [[[p(x,y,z)]]]}')
def _(paths, schema, params):
    _need(paths, 1, "probability tensor")
    return infogain.conditional_mutual_information(_json_file(paths[0], {"tensor"})["tensor"])


@_entry("loss_of_anonymity", "mechanism JSON (one, or several with --param p_z=[...])")
def _(paths, schema, params):
    if not paths:
        raise ParamError("expected at least one mechanism file")
    channels = [parse_mechanism(_read(p)) for p in paths]
    if len(channels) == 1:
        return infogain.channel_capacity(channels[0])
    p_z = [float(v) for v in p_list(params, "p_z")]
    return infogain.conditional_channel_capacity(channels, p_z)


@_entry("max_information_leakage", "joint distribution JSON")
def _(paths, schema, params):
    _need(paths, 1, "joint distribution")
    return infogain.max_information_leakage(parse_joint(_read(paths[0])))


@_entry("system_anonymity_level", '{"n": ..., "bits": [[...]], "classes"?: [...]}')
def _(paths, schema, params):
    _need(paths, 1, "adjacency matrix")
    return infogain.system_anonymity_level(infogain.parse_adjacency(_read(paths[0])))


@_entry("information_surprisal", "--param p=...")
def _(paths, schema, params):
    _need(paths, 0, "parameters only")
    return infogain.surprisal(p_float(params, "p"))


@_entry("belief_increase", "--param prior=... posterior=... delta=...")
def _(paths, schema, params):
    _need(paths, 0, "parameters only")
    return infogain.belief_increase_check(
        p_float(params, "prior"), p_float(params, "posterior"), p_float(params, "delta")
    )


@_entry("feature_reduction", "protected and original {\"transitions\": [...], \"window\"?: N}")
def _(paths, schema, params):
    _need(paths, 2, "protected and original series")

    def series(path):
        obj = _json_file(path, {"transitions"}, optional={"window"})
        return infogain.FeatureSeries.of(obj["transitions"], obj.get("window"))

    return infogain.feature_mass_reduction(series(paths[0]), series(paths[1]))


@_entry("privacy_score", '{"sensitivities": [...], "visibilities": [...]}')
def _(paths, schema, params):
    _need(paths, 1, "scores")
    obj = _json_file(paths[0], {"sensitivities", "visibilities"})
    return infogain.privacy_score(
        [float(v) for v in obj["sensitivities"]], [float(v) for v in obj["visibilities"]]
    )


@_entry("pearson_correlation", '{"x": [...], "y": [...]}')
def _(paths, schema, params):
    _need(paths, 1, "paired series")
    obj = _json_file(paths[0], {"x", "y"})
    return infogain.pearson_abs([float(v) for v in obj["x"]], [float(v) for v in obj["y"]])


# --- similarity ------------------------------------------------------------


@_entry("k_anonymity", "table CSV + --schema roles JSON")
def _(paths, schema, params):
    return tabular.k_anonymity(_table_from(paths, schema))


@_entry("alpha_k_anonymity", "table CSV + --schema; --param value=...")
def _(paths, schema, params):
    return tabular.alpha_k_anonymity(_table_from(paths, schema), p_str(params, "value"))


@_entry("l_diversity", "table CSV + --schema; --param mode=entropy|recursive [c=1]")
def _(paths, schema, params):
    return tabular.l_diversity(
        _table_from(paths, schema),
        p_str(params, "mode", "entropy"),
        p_float(params, "c", 1.0),
    )


@_entry("m_invariance", "releases JSON (csv_path, roles, owners per release)")
def _(paths, schema, params):
    _need(paths, 1, "releases file")
    return tabular.m_invariance(tabular.load_releases(paths[0]))


@_entry("t_closeness", "table CSV + --schema roles JSON")
def _(paths, schema, params):
    return tabular.t_closeness(_table_from(paths, schema))


@_entry("ct_isolation", '{"points": [[...]], "guess": [...]}; --param target_index=N c=... [t=N]')
def _(paths, schema, params):
    _need(paths, 1, "points and guess")
    obj = _json_file(paths[0], {"points", "guess"})
    result = tabular.ct_isolation(
        obj["points"], obj["guess"], p_int(params, "target_index"), p_float(params, "c")
    )
    if "t" in params:
        result["isolated"] = result["ball_count"] < p_int(params, "t")
    return result


@_entry("ke_anonymity", "table CSV + --schema roles JSON")
def _(paths, schema, params):
    return tabular.ke_anonymity(_table_from(paths, schema))


@_entry("em_anonymity", "table CSV + --schema; --param epsilon=...")
def _(paths, schema, params):
    return tabular.em_anonymity(_table_from(paths, schema), p_float(params, "epsilon"))


@_entry("multirelational_k_anonymity", 'join spec JSON {"persons", "relations", "join_keys"}')
def _(paths, schema, params):
    _need(paths, 1, "join spec")
    obj = _json_file(paths[0], {"persons", "relations", "join_keys"})
    base = Path(paths[0]).parent
    persons = _table_spec(obj["persons"], base)
    relations = [_table_spec(spec, base) for spec in obj["relations"]]
    return tabular.multirelational_k(persons, relations, [str(k) for k in obj["join_keys"]])


@_entry("xy_privacy", "table CSV + --schema; --param x_cols=[...] y_cols=[...]")
def _(paths, schema, params):
    return tabular.xy_privacy(
        _table_from(paths, schema),
        [str(c) for c in p_list(params, "x_cols")],
        [str(c) for c in p_list(params, "y_cols")],
    )


@_entry("historical_k_anonymity", 'histories JSON, {"requests": [{"t", "cell"}]}')
def _(paths, schema, params):
    _need(paths, 2, "histories and requests")
    histories = tabular.parse_location_histories(_read(paths[0]))
    reqs = _json_file(paths[1], {"requests"})["requests"]
    requests = [(float(r["t"]), str(r["cell"])) for r in reqs]
    return tabular.historical_k(histories, requests)


@_entry("haplotype_snp_test", "--param n=... l=... [alpha=...] [mode=aggregate] [log_base=2]")
def _(paths, schema, params):
    _need(paths, 0, "parameters only")
    return tabular.haplotype_safety(
        p_int(params, "n"),
        p_int(params, "l"),
        p_float(params, "alpha", 0.0),
        p_str(params, "mode", "aggregate"),
        p_float(params, "log_base", 2.0),
    )


@_entry("cluster_similarity", '{"original": [...], "protected": [...]}')
def _(paths, schema, params):
    _need(paths, 1, "cluster assignments")
    obj = _json_file(paths[0], {"original", "protected"})
    return tabular.cluster_similarity(obj["original"], obj["protected"])


@_entry("r_squared", '{"transitions": [...]}')
def _(paths, schema, params):
    _need(paths, 1, "transition series")
    obj = _json_file(paths[0], {"transitions"})
    return tabular.r_squared_transitions([float(v) for v in obj["transitions"]])


@_entry("normalized_variance", '{"x": [...], "y": [...]}')
def _(paths, schema, params):
    _need(paths, 1, "paired series")
    obj = _json_file(paths[0], {"x", "y"})
    return tabular.normalized_variance(
        [float(v) for v in obj["x"]], [float(v) for v in obj["y"]]
    )


# --- indistinguishability ---------------------------------------------------


@_entry("differential_privacy", "mechanism JSON, neighbor-relation JSON")
def _(paths, schema, params):
    _need(paths, 2, "mechanism and neighbors")
    return indist.dp_epsilon(
        parse_mechanism(_read(paths[0])), indist.parse_neighbor_relation(_read(paths[1]))
    )


@_entry("approximate_differential_privacy", "mechanism JSON, neighbor JSON; --param eps=...")
def _(paths, schema, params):
    _need(paths, 2, "mechanism and neighbors")
    return indist.adp_delta(
        parse_mechanism(_read(paths[0])),
        indist.parse_neighbor_relation(_read(paths[1])),
        p_float(params, "eps"),
    )


@_entry("geo_indistinguishability", '{"locations": [[id,x,y]], "outputs", "matrix"}')
def _(paths, schema, params):
    _need(paths, 1, "geo mechanism")
    return indist.geo_indistinguishability(indist.parse_geo_mechanism(_read(paths[0])))


@_entry("information_privacy", "joint (sensitive x output) JSON; --param eps=...")
def _(paths, schema, params):
    _need(paths, 1, "joint distribution")
    return indist.information_privacy(parse_joint(_read(paths[0])), p_float(params, "eps"))


@_entry("distributional_privacy", "--param l1=... l2=... prior_ratio=... eps=...")
def _(paths, schema, params):
    _need(paths, 0, "parameters only")
    return indist.distributional_privacy(
        p_float(params, "l1"),
        p_float(params, "l2"),
        p_float(params, "prior_ratio"),
        p_float(params, "eps"),
    )


@_entry("cryptographic_game", "transcript JSON; --param eps=...")
def _(paths, schema, params):
    _need(paths, 1, "game transcript")
    result = indist.game_advantage(
        indist.parse_game_transcript(_read(paths[0])), p_float(params, "eps")
    )
    result["ci95"] = list(result["ci95"])
    return result


@_entry("unconditional_privacy", "transcript JSON")
def _(paths, schema, params):
    _need(paths, 1, "game transcript")
    return indist.unconditional_privacy(indist.parse_game_transcript(_read(paths[0])))


# --- success ----------------------------------------------------------------


@_entry("success_rate", '{"trials": [true/false, ...]}')
def _(paths, schema, params):
    _need(paths, 1, "trial outcomes")
    return adversary.success_rate(
        [bool(t) for t in _json_file(paths[0], {"trials"})["trials"]]
    )


@_entry("path_compromise", "--param compromised=N total=N path_length=N")
def _(paths, schema, params):
    _need(paths, 0, "parameters only")
    return adversary.path_compromise_probability(
        p_int(params, "compromised"), p_int(params, "total"), p_int(params, "path_length")
    )


@_entry("degrees_of_anonymity", "posterior distribution; --param target=... theta=... [alpha=0.5]")
def _(paths, schema, params):
    _need(paths, 1, "posterior distribution")
    return adversary.degrees_of_anonymity(
        _dist(paths),
        p_str(params, "target"),
        p_float(params, "theta"),
        p_float(params, "alpha", 0.5),
    )


@_entry("privacy_breach_level", '{"posteriors": [...]}; --param rho=...')
def _(paths, schema, params):
    _need(paths, 1, "posteriors")
    return adversary.privacy_breach_check(
        [float(v) for v in _json_file(paths[0], {"posteriors"})["posteriors"]],
        p_float(params, "rho"),
    )


@_entry("dg_privacy", "--param prior=... posterior=... d=... gamma=...")
def _(paths, schema, params):
    _need(paths, 0, "parameters only")
    return adversary.dg_privacy_check(
        p_float(params, "prior"),
        p_float(params, "posterior"),
        p_float(params, "d"),
        p_float(params, "gamma"),
    )


@_entry("delta_presence", 'presence spec JSON {"external": {...}, "published": {...}}')
def _(paths, schema, params):
    _need(paths, 1, "presence spec")
    obj = _json_file(paths[0], {"external", "published"})
    base = Path(paths[0]).parent
    return adversary.delta_presence(
        _table_spec(obj["external"], base), _table_spec(obj["published"], base)
    )


@_entry("hiding_property", '{"matrix": [[...]]}; --param theta=...')
def _(paths, schema, params):
    _need(paths, 1, "assignment probabilities")
    return adversary.hiding_property(
        _json_file(paths[0], {"matrix"})["matrix"], p_float(params, "theta")
    )


# --- error ------------------------------------------------------------------


@_entry("expected_estimation_error", 'estimate JSON {"posterior", "truth", "metric"?, "coords"?}')
def _(paths, schema, params):
    _need(paths, 1, "estimate")
    return adversary.expected_estimation_error(adversary.parse_estimate(_read(paths[0])))


@_entry("expectation_of_distance_error", '{"steps": [[[p, d], ...], ...], "n_users": N}')
def _(paths, schema, params):
    _need(paths, 1, "hypothesis steps")
    obj = _json_file(paths[0], {"steps", "n_users"})
    steps = [[(float(p), float(d)) for p, d in step] for step in obj["steps"]]
    return adversary.distance_error_expectation(steps, int(obj["n_users"]), len(steps))


@_entry("mean_squared_error", '{"truths": [...], "observations": [...]}')
def _(paths, schema, params):
    _need(paths, 1, "truths and observations")
    obj = _json_file(paths[0], {"truths", "observations"})
    return adversary.mean_squared_error(obj["truths"], obj["observations"])


@_entry("pct_incorrectly_classified", "--param incorrect=N total=N")
def _(paths, schema, params):
    _need(paths, 0, "parameters only")
    return adversary.pct_incorrect(p_int(params, "incorrect"), p_int(params, "total"))


@_entry("health_privacy", '{"weights": [...], "values": [...]}')
def _(paths, schema, params):
    _need(paths, 1, "weighted base values")
    obj = _json_file(paths[0], {"weights", "values"})
    return adversary.health_privacy(
        [float(v) for v in obj["weights"]], [float(v) for v in obj["values"]]
    )


# --- time -------------------------------------------------------------------


@_entry("time_until_success", "--param m=N l=N n=N b=N")
def _(paths, schema, params):
    _need(paths, 0, "parameters only")
    return adversary.batch_mix_rounds(
        p_int(params, "m"), p_int(params, "l"), p_int(params, "n"), p_int(params, "b")
    )


@_entry("max_tracking_time", "anonymity-set-size trace JSON; --param end_time=...")
def _(paths, schema, params):
    _need(paths, 1, "trace")
    return adversary.max_tracking_time(
        parse_trace(_read(paths[0])), p_float(params, "end_time")
    )


@_entry("time_to_confusion", "entropy trace JSON; --param delta=... end_time=...")
def _(paths, schema, params):
    _need(paths, 1, "trace")
    return adversary.time_to_confusion(
        parse_trace(_read(paths[0])), p_float(params, "delta"), p_float(params, "end_time")
    )


# --- accuracy ---------------------------------------------------------------


@_entry("confidence_interval_width", '{"atoms": [[v, p], ...]} or {"samples": [...]}; --param c=95')
def _(paths, schema, params):
    _need(paths, 1, "estimate mass")
    obj = _load_json(_read(paths[0]), "estimate mass")
    c = p_float(params, "c", 95.0)
    if isinstance(obj, dict) and set(obj) == {"atoms"}:
        atoms = [(float(v), float(p)) for v, p in obj["atoms"]]
        return adversary.confidence_interval_width(atoms=atoms, c=c)
    if isinstance(obj, dict) and set(obj) == {"samples"}:
        return adversary.confidence_interval_width(
            samples=[float(v) for v in obj["samples"]], c=c
        )
    raise SchemaError('expected {"atoms": [[value, prob], ...]} or {"samples": [...]}')


@_entry("tp_privacy_violation", "--param rho_base=... rho_with=... p=...")
def _(paths, schema, params):
    _need(paths, 0, "parameters only")
    return adversary.tp_violation_check(
        p_float(params, "rho_base"), p_float(params, "rho_with"), p_float(params, "p")
    )


@_entry("event_unobservability", '{"f1": [...], "f2": [...]}; --param p1 p2 alpha eps')
def _(paths, schema, params):
    _need(paths, 1, "sample sets")
    obj = _json_file(paths[0], {"f1", "f2"})
    return adversary.event_unobservability(
        [float(v) for v in obj["f1"]],
        [float(v) for v in obj["f2"]],
        p_float(params, "p1"),
        p_float(params, "p2"),
        p_float(params, "alpha"),
        p_float(params, "eps"),
    )


@_entry("uncertainty_region_size", "region JSON")
def _(paths, schema, params):
    _need(paths, 1, "region")
    return adversary.region_privacy(parse_region(_read(paths[0])))["size"]


@_entry("coverage_of_sensitive_region", "uncertainty region JSON, sensitive region JSON")
def _(paths, schema, params):
    _need(paths, 2, "two regions")
    r_u = parse_region(_read(paths[0]))
    r_s = parse_region(_read(paths[1]))
    return adversary.region_privacy(r_u, r_s)["coverage"]


@_entry("accuracy_of_obfuscated_region", "--param r_opt=... r_min=...")
def _(paths, schema, params):
    _need(paths, 0, "parameters only")
    return adversary.obfuscation_accuracy(p_float(params, "r_opt"), p_float(params, "r_min"))


# ---------------------------------------------------------------------------
# Range checking and the public compute() front


def _scalar_in_interval(value: float, rng: dict) -> bool:
    lo, hi = rng.get("lo"), rng.get("hi")
    if isinstance(lo, (int, float)):
        if rng.get("lo_open") and value <= lo:
            return False
        if not rng.get("lo_open") and value < lo:
            return False
    if isinstance(hi, (int, float)) and value > hi:
        return False
    return True


def in_declared_range(value, rng: dict) -> bool:
    """Best-effort check of a metric value against its catalog range.

    Symbolic endpoints (like the alphabet size) and mixed records against
    scalar ranges cannot be checked and count as in range.
    """
    if rng["kind"] == "enum":
        if isinstance(value, bool):
            return str(value).lower() in rng["values"]
        if isinstance(value, str):
            return value in rng["values"]
        return True
    if rng["kind"] == "per_parameter":
        if isinstance(value, dict):
            return all(
                _scalar_in_interval(value[k], part)
                for k, part in rng["parts"].items()
                if k in value and isinstance(value[k], (int, float))
            )
        return True
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        if isinstance(value, float) and math.isnan(value):
            return False
        return _scalar_in_interval(float(value), rng)
    return True


def compute_ids() -> tuple[str, ...]:
    return tuple(sorted(_ENTRIES))


def inputs_help(metric_id: str) -> str:
    return _ENTRIES[metric_id].inputs_help


def compute(
    metric_id: str,
    paths: Sequence[str] = (),
    schema: str | None = None,
    params: dict | None = None,
) -> MetricValue:
    """Compute one catalog metric from input files and parameters."""
    descriptor = registry.lookup(metric_id)
    if not descriptor.implemented:
        raise ParamError(
            f"{metric_id} is a descriptor-only metric with no implementation"
        )
    entry = _ENTRIES[descriptor.op_ref]
    value = entry.fn(list(paths), schema, dict(params or {}))
    return MetricValue(
        metric_id=metric_id,
        value=value,
        unit=descriptor.unit,
        out_of_range=not in_declared_range(value, descriptor.value_range),
    )
