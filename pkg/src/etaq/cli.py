"""Batch command line surface.

JSON is the canonical output (sorted keys, so bytes are reproducible);
CSV and TSV are flat projections of the same records.  Exit codes:
0 success, 1 usage, 2 precondition failure, 3 resource limit with any
partial output flagged.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from . import arith, classify, hecke, modular, partitions, qseries
from .errors import EtaqError, ResourceLimit, UsageError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PRECONDITION = 2
EXIT_RESOURCE = 3

SUBCOMMANDS = (
    "expand",
    "meta",
    "density",
    "cores",
    "verify",
    "s-search",
    "hecke-test",
    "interpolate",
    "classify",
)


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs, round-trippable through JSON."""

    subcommand: str
    params: dict
    format: str = "json"
    out: str | None = None
    cache_dir: str | None = None
    seed: int = 0
    jobs: int = 1
    factor_budget: int = arith.DEFAULT_FACTOR_BUDGET
    partition_budget: int = partitions.DEFAULT_PARTITION_BUDGET

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        if self.format not in ("json", "csv", "tsv"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.factor_budget <= 0 or self.partition_budget <= 0:
            raise UsageError("budgets must be positive")
        if self.jobs < 1:
            raise UsageError("jobs must be >= 1")

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "params": dict(self.params),
            "format": self.format,
            "out": self.out,
            "cache_dir": self.cache_dir,
            "seed": self.seed,
            "jobs": self.jobs,
            "factor_budget": self.factor_budget,
            "partition_budget": self.partition_budget,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return cls(**data)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def parse_range(spec: str) -> list[int]:
    """'4', '4..6', and comma mixtures of both, as a sorted list."""
    values: set[int] = set()
    try:
        for part in str(spec).split(","):
            part = part.strip()
            if not part:
                continue
            if ".." in part:
                lo, hi = part.split("..", 1)
                values.update(range(int(lo), int(hi) + 1))
            else:
                values.add(int(part))
    except ValueError as exc:
        raise UsageError(f"bad range {spec!r}: {exc}") from None
    if not values:
        raise UsageError(f"empty range {spec!r}")
    return sorted(values)


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _cached_expand(config: RunConfig, a: int, b: int, c: int, trunc: int) -> qseries.QSeries:
    """Series cache keyed by operation and canonical parameters; hit and
    miss must be indistinguishable to callers."""
    if config.cache_dir is None:
        return qseries.expand_eta_triple(a, b, c, trunc)
    cache = Path(config.cache_dir)
    cache.mkdir(parents=True, exist_ok=True)
    path = cache / f"qseries_expand_a{a}_b{b}_c{c}_T{trunc}.tsv"
    if path.exists():
        return qseries.load_series(path)
    series = qseries.expand_eta_triple(a, b, c, trunc)
    qseries.save_series(path, series)
    return series


def _run_expand(config: RunConfig):
    p = config.params
    a, b, c, terms = p["a"], p["b"], p["c"], p["terms"]
    series = _cached_expand(config, a, b, c, terms)
    payload = {
        "a": a,
        "b": b,
        "c": c,
        "r": qseries.leading_exponent(a, b, c),
        "trunc": terms,
        "nnz": series.nnz,
        "coefficients": [[e, _jsonable(v)] for e, v in sorted(series.coeffs.items())],
    }
    return payload, EXIT_OK


def _run_meta(config: RunConfig):
    p = config.params
    triple = modular.EtaTriple(p["a"], p["b"], p["c"])
    if triple.b % 2 == 1:
        character = modular.triple_character(triple)
        character_d = character.numerator
    else:
        character_d = None
    orders = modular.cusp_orders(triple.quotient())
    payload = {
        "a": triple.a,
        "b": triple.b,
        "c": triple.c,
        "r": triple.leading_exponent,
        "weight": _jsonable(triple.weight),
        "level": triple.level,
        "optimal_level": modular.optimal_level(triple),
        "character_D": character_d,
        "classification": modular.classify_holomorphy(triple),
        "cusp_orders": [[y, _jsonable(v)] for y, v in sorted(orders.items())],
    }
    return payload, EXIT_OK


def _run_density(config: RunConfig):
    p = config.params
    a, b, c = p["a"], p["b"], p["c"]
    series = _cached_expand(config, a, b, c, p["bound"])
    rows = classify.coefficient_density(a, b, c, p["bound"], p["decades"], _series=series)
    payload = {
        "a": a,
        "b": b,
        "c": c,
        "bound": p["bound"],
        "decades": p["decades"],
        "rows": rows,
    }
    return payload, EXIT_OK


def _run_cores(config: RunConfig):
    p = config.params
    a, max_m = p["a"], p["max_m"]
    gf = partitions.core_generating_series(a, max_m + 1)
    rows = []
    partial = False
    for m in range(max_m + 1):
        row = {"a": a, "m": m, "count": gf[m]}
        if p["verify"]:
            try:
                partitions.count_cores(a, m, verify=True, budget=config.partition_budget)
            except ResourceLimit:
                partial = True
                break
            row["verified"] = True
        rows.append(row)
    payload = {"a": a, "max_m": max_m, "verify": p["verify"], "rows": rows}
    if partial:
        payload["partial"] = True
    return payload, EXIT_RESOURCE if partial else EXIT_OK


def _verify_one(identity: str, terms: int, params: dict, budget: int) -> dict:
    if identity == "euler":
        ok = qseries.euler_product_direct(terms) == qseries.euler_product(terms)
    elif identity == "jacobi":
        ok = qseries.euler_product(terms) ** 3 == qseries.jacobi_cube(terms)
    elif identity == "nekrasov-okounkov":
        b = params["b"]
        lhs = partitions.nekrasov_okounkov_sum(b, terms, budget=budget)
        ok = lhs == qseries.euler_product(terms) ** (b - 1)
    elif identity == "han":
        a, b, c = params["a"], params["b"], params["c"]
        lhs = partitions.han_hook_sum(a, b, c, terms, budget=budget)
        ok = lhs == qseries.normalized_coefficients(a, b, c, terms)
    else:
        raise UsageError(f"unknown identity {identity!r}")
    return {"identity": identity, "terms": terms, "params": params, "ok": ok}


def _run_verify(config: RunConfig):
    p = config.params
    identity = p["identity"]
    terms = p["terms"]
    checks = []
    if identity == "euler" or identity == "jacobi":
        checks.append(_verify_one(identity, terms, {}, config.partition_budget))
    elif identity == "nekrasov-okounkov":
        bs = [p["b"]] if p.get("b") is not None else list(range(6))
        for b in bs:
            checks.append(_verify_one(identity, terms, {"b": b}, config.partition_budget))
    elif identity == "han":
        if p.get("a") is not None:
            trials = [(p["a"], p["b"], p["c"])]
        else:
            rng = random.Random(config.seed)
            trials = []
            for _ in range(p["samples"]):
                a = rng.randint(1, 3)
                c = rng.randint(1, 3)
                b = a + 2 * rng.randint(0, 2)
                trials.append((a, b, c))
        for a, b, c in trials:
            checks.append(
                _verify_one(identity, terms, {"a": a, "b": b, "c": c}, config.partition_budget)
            )
    else:
        raise UsageError(f"unknown identity {identity!r}")
    ok = all(ch["ok"] for ch in checks)
    payload = {"identity": identity, "terms": terms, "ok": ok, "checks": checks}
    return payload, EXIT_OK if ok else EXIT_PRECONDITION


def _run_s_search(config: RunConfig):
    p = config.params
    if p.get("a_prime") is not None:
        a_prime = p["a_prime"]
    else:
        a_prime = arith.radical(576 * p["a"] * p["c"], budget=config.factor_budget)
    result = arith.search_inert_index(a_prime, p["limit"])
    return result.to_dict(), EXIT_OK


def _run_hecke_test(config: RunConfig):
    p = config.params
    result = hecke.hecke_elimination(p["a"], p["b"], p["c"], p["p"])
    return result.to_dict(), EXIT_OK


def _run_interpolate(config: RunConfig):
    p = config.params
    poly = classify.coefficient_polynomial(p["a"], p["c"], p["m"])
    payload = poly.to_dict()
    payload["odd_positive_roots"] = classify.odd_positive_roots(poly)
    return payload, EXIT_OK


def _run_classify(config: RunConfig):
    p = config.params
    a_values = parse_range(p["a"])
    c_values = parse_range(p["c"])
    box = {(a, c) for a in a_values for c in c_values}
    checkpoint = p.get("checkpoint")
    shards: dict[tuple[int, int], dict] = {}
    if p.get("resume"):
        if not checkpoint:
            raise UsageError("--resume requires --checkpoint")
        done_path = Path(checkpoint)
        shard_path = Path(checkpoint + ".shards.jsonl")
        if done_path.exists() and shard_path.exists():
            keys = {tuple(k) for k in json.loads(done_path.read_text())}
            for line in shard_path.read_text().splitlines():
                record = json.loads(line)
                key = tuple(record["key"])
                if key in keys and key in box:
                    shards[key] = record["shard"]

    def checkpoint_hook(key, shard):
        shards[key] = shard
        if checkpoint:
            with open(checkpoint + ".shards.jsonl", "a") as fh:
                fh.write(json.dumps({"key": list(key), "shard": shard}, sort_keys=True) + "\n")
            Path(checkpoint).write_text(
                json.dumps(sorted(list(k) for k in shards), sort_keys=True) + "\n"
            )

    classify.classify_pipeline(
        a_values,
        c_values,
        b_max=p["b_max"],
        s_limit=p["s_limit"],
        hecke_rounds=p["hecke_rounds"],
        jobs=config.jobs,
        skip_keys=set(shards),
        shard_hook=checkpoint_hook,
    )
    result = classify.merge_shards(
        {
            "a_values": a_values,
            "c_values": c_values,
            "b_max": p["b_max"],
            "s_limit": p["s_limit"],
            "hecke_rounds": p["hecke_rounds"],
        },
        shards,
    )
    payload = result.to_dict()
    if not result.complete:
        payload["partial"] = True
    return payload, EXIT_OK if result.complete else EXIT_RESOURCE


_HANDLERS = {
    "expand": _run_expand,
    "meta": _run_meta,
    "density": _run_density,
    "cores": _run_cores,
    "verify": _run_verify,
    "s-search": _run_s_search,
    "hecke-test": _run_hecke_test,
    "interpolate": _run_interpolate,
    "classify": _run_classify,
}


def _project(subcommand: str, payload: dict) -> tuple[list[str], list[dict]]:
    """Flatten the canonical record into delimited rows."""
    if subcommand == "expand":
        return ["exponent", "coefficient"], [
            {"exponent": e, "coefficient": v} for e, v in payload["coefficients"]
        ]
    if subcommand == "meta":
        fields = [
            "a", "b", "c", "r", "weight", "level", "optimal_level",
            "character_D", "classification",
        ]
        return fields, [{k: payload[k] for k in fields}]
    if subcommand == "density":
        return ["a", "b", "c", "bound", "nonzero", "fraction"], payload["rows"]
    if subcommand == "cores":
        return ["a", "m", "count"], payload["rows"]
    if subcommand == "verify":
        return ["identity", "terms", "params", "ok"], [
            {**ch, "params": json.dumps(ch["params"], sort_keys=True)}
            for ch in payload["checks"]
        ]
    if subcommand == "s-search":
        row = dict(payload)
        row["certificate"] = json.dumps(payload["certificate"], sort_keys=True)
        return ["a_prime", "s", "limit", "certificate"], [row]
    if subcommand == "hecke-test":
        return ["a", "b", "c", "p", "m0", "witness", "eliminated"], [payload]
    if subcommand == "interpolate":
        row = dict(payload)
        row["coefficients"] = " ".join(payload["coefficients"])
        row["odd_positive_roots"] = " ".join(map(str, payload["odd_positive_roots"]))
        return ["a", "c", "m", "degree_bound", "coefficients", "odd_positive_roots"], [row]
    if subcommand == "classify":
        fields = [
            "a", "b", "c", "status", "eliminated_by", "witness",
            "witness_index", "primes_tried",
        ]
        rows = [
            {**r, "primes_tried": " ".join(map(str, r["primes_tried"]))}
            for r in payload["reports"]
        ]
        return fields, rows
    raise UsageError(f"no delimited projection for {subcommand!r}")


def _emit(config: RunConfig, payload: dict) -> None:
    figure = None
    if config.out and config.subcommand in ("density", "classify"):
        from . import report

        png = Path(config.out).with_suffix(".png")
        if config.subcommand == "density":
            report.density_figure(payload["rows"], png)
        else:
            report.classify_figure(payload, png)
        figure = str(png)
        payload = {**payload, "figure": figure}
    if config.format == "json":
        text = json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n"
        if config.out:
            Path(config.out).write_text(text)
        else:
            sys.stdout.write(text)
    else:
        delimiter = "," if config.format == "csv" else "\t"
        fieldnames, rows = _project(config.subcommand, _jsonable(payload))
        if config.out:
            from .report import write_delimited

            write_delimited(config.out, fieldnames, rows, delimiter)
        else:
            writer = csv.DictWriter(sys.stdout, fieldnames=fieldnames, delimiter=delimiter)
            writer.writeheader()
            for row in rows:
                writer.writerow({k: row.get(k, "") for k in fieldnames})


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "tsv"), default="json")
    common.add_argument("--out", default=None, help="write output to this file")
    common.add_argument("--cache-dir", default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--factor-budget", type=int, default=None)
    common.add_argument("--partition-budget", type=int, default=None)
    common.add_argument("--dump-config", default=None, metavar="PATH")

    parser = _Parser(prog="etaq", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    sp = sub.add_parser("expand", parents=[common], help="q-expansion of an eta triple")
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--b", type=int, required=True)
    sp.add_argument("--c", type=int, required=True)
    sp.add_argument("--terms", type=int, required=True)

    sp = sub.add_parser("meta", parents=[common], help="modular metadata of a triple")
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--b", type=int, required=True)
    sp.add_argument("--c", type=int, required=True)

    sp = sub.add_parser("density", parents=[common], help="nonzero coefficient density")
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--b", type=int, required=True)
    sp.add_argument("--c", type=int, required=True)
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--decades", type=int, default=4)

    sp = sub.add_parser("cores", parents=[common], help="a-core counts")
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--max-m", type=int, required=True)
    sp.add_argument("--verify", action="store_true", help="cross-check by enumeration")

    sp = sub.add_parser("verify", parents=[common], help="check a partition identity")
    sp.add_argument(
        "--identity",
        choices=("euler", "jacobi", "nekrasov-okounkov", "han"),
        required=True,
    )
    sp.add_argument("--terms", type=int, required=True)
    sp.add_argument("--a", type=int, default=None)
    sp.add_argument("--b", type=int, default=None)
    sp.add_argument("--c", type=int, default=None)
    sp.add_argument("--samples", type=int, default=5, help="random han trials when a,b,c absent")

    sp = sub.add_parser("s-search", parents=[common], help="least inert index for a level kernel")
    sp.add_argument("--a-prime", type=int, default=None)
    sp.add_argument("--a", type=int, default=None)
    sp.add_argument("--c", type=int, default=None)
    sp.add_argument("--limit", type=int, default=10**4)

    sp = sub.add_parser("hecke-test", parents=[common], help="single elimination witness")
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--b", type=int, required=True)
    sp.add_argument("--c", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)

    sp = sub.add_parser("interpolate", parents=[common], help="coefficient polynomial in b")
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--c", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)

    sp = sub.add_parser("classify", parents=[common], help="staged lacunarity search")
    sp.add_argument("--a", required=True, help="range, e.g. 4..6")
    sp.add_argument("--c", required=True, help="range, e.g. 2..12")
    sp.add_argument("--b-max", type=int, default=99)
    sp.add_argument("--s-limit", type=int, default=10**4)
    sp.add_argument("--hecke-rounds", type=int, default=3)
    sp.add_argument("--checkpoint", default=None, help="JSON list of completed (a,c) shards")
    sp.add_argument("--resume", action="store_true")

    return parser


_PARAM_KEYS = {
    "expand": ("a", "b", "c", "terms"),
    "meta": ("a", "b", "c"),
    "density": ("a", "b", "c", "bound", "decades"),
    "cores": ("a", "max_m", "verify"),
    "verify": ("identity", "terms", "a", "b", "c", "samples"),
    "s-search": ("a_prime", "a", "c", "limit"),
    "hecke-test": ("a", "b", "c", "p"),
    "interpolate": ("a", "c", "m"),
    "classify": ("a", "c", "b_max", "s_limit", "hecke_rounds", "checkpoint", "resume"),
}


def build_config(argv) -> tuple[RunConfig, str | None]:
    ns = _build_parser().parse_args(argv)
    params = {key: getattr(ns, key) for key in _PARAM_KEYS[ns.subcommand]}
    if ns.subcommand == "s-search":
        if params["a_prime"] is None and (params["a"] is None or params["c"] is None):
            raise UsageError("s-search needs --a-prime or both --a and --c")
    if ns.subcommand == "verify":
        if params["identity"] == "nekrasov-okounkov" and params["b"] is not None and params["b"] < 0:
            raise UsageError("--b must be non-negative here")
        if params["identity"] == "han" and params["a"] is not None:
            if params["b"] is None or params["c"] is None:
                raise UsageError("han with --a needs --b and --c too")
    cache_dir = ns.cache_dir or os.environ.get("ETAQ_CACHE_DIR") or None
    factor_budget = ns.factor_budget
    if factor_budget is None:
        factor_budget = int(
            os.environ.get("ETAQ_FACTOR_BUDGET", arith.DEFAULT_FACTOR_BUDGET)
        )
    partition_budget = ns.partition_budget
    if partition_budget is None:
        partition_budget = int(
            os.environ.get("ETAQ_PARTITION_BUDGET", partitions.DEFAULT_PARTITION_BUDGET)
        )
    config = RunConfig(
        subcommand=ns.subcommand,
        params=params,
        format=ns.format,
        out=ns.out,
        cache_dir=cache_dir,
        seed=ns.seed,
        jobs=ns.jobs,
        factor_budget=factor_budget,
        partition_budget=partition_budget,
    )
    return config, ns.dump_config


def run(config: RunConfig) -> int:
    """Dispatch one configured invocation; returns the exit code."""
    payload, code = _HANDLERS[config.subcommand](config)
    _emit(config, payload)
    return code


def main(argv=None) -> int:
    try:
        config, dump_path = build_config(argv)
        if dump_path:
            config.save(dump_path)
        return run(config)
    except UsageError as exc:
        sys.stderr.write(
            json.dumps({"error": "usage", "message": str(exc)}, sort_keys=True) + "\n"
        )
        return EXIT_USAGE
    except ResourceLimit as exc:
        record = {
            "error": "resource-limit",
            "message": str(exc),
            "partial": _jsonable(exc.partial),
        }
        sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")
        return EXIT_RESOURCE
    except (EtaqError, ValueError) as exc:
        record = {
            "error": "precondition",
            "kind": type(exc).__name__,
            "message": str(exc),
        }
        sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
