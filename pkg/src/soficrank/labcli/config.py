"""Experiment configuration: a single JSON document, exact numbers as strings.

Schema (keys other than ``matrix`` and ``approximation`` are optional)::

    {
      "name": "z-circulant",
      "field": {"kind": "rationals"},            # or number_field / function_field
      "rank": "1",                               # free generators a, b, c, ...
      "matrix": [["1-a"]],                       # rows of group-algebra entries
      "representation": {"matrices": [[["-1"]]], "relators": ["a^2"]},
      "approximation": {"preset": "zd_congruence", "params": {"d": "1", "moduli": ["2", "3"]}},
      "limit": "1",
      "checks": ["convergence", "twisted", "modp_bound", "moments", "semicontinuity"],
      "primes": {"count": "5", "min": "2", "max_degree": "1", "list": ["2", {"p": "7", "gbar": ["4", "1"]}]},
      "residue": {"p": "5"},
      "moments": {"L": "4"},
      "specialization": {"points": [["1"], ["1/2"]]},
      "seed": "7",
      "caps": {"max_set_size": "1000000"}
    }

Integers may also be JSON integers; anything non-integral must be a string.
"""
from __future__ import annotations

import hashlib
import json
import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from ..caps import Caps
from ..coeff import Domain, FunctionField, NumberField, PrimeIdeal, Rationals, domain_from_descriptor
from ..errors import ConfigError, ParseError, SoficRankError
from ..freealg import GAMatrix, parse_word

CHECKS = ("convergence", "twisted", "modp_bound", "moments", "semicontinuity")
PRESETS = ("zd_congruence", "finite_regular", "free_random_perm", "finite_quotient", "sigma_image")
_KEYS = {"name", "field", "rank", "matrix", "representation", "approximation", "limit", "checks",
         "primes", "residue", "moments", "specialization", "seed", "caps"}


@dataclass
class RepresentationSpec:
    matrices: tuple        # per generator, rows of coefficient strings
    relators: tuple = ()


@dataclass
class PrimeSpec:
    count: int = 5
    min_p: int = 2
    max_degree: int = 1
    explicit: tuple = ()   # PrimeIdeal values

    def is_default(self) -> bool:
        return self == PrimeSpec()


@dataclass
class ExperimentConfig:
    matrix: tuple
    preset: str
    params: dict
    name: str = ""
    field: dict = dataclasses.field(default_factory=lambda: {"kind": "rationals"})
    rank: int = 2
    representation: RepresentationSpec | None = None
    limit: Fraction | None = None
    checks: tuple = ("convergence",)
    primes: PrimeSpec = dataclasses.field(default_factory=PrimeSpec)
    residue: PrimeIdeal | None = None
    moments_L: int = 4
    points: tuple = ()
    seed: int | None = None
    caps: dict = dataclasses.field(default_factory=dict)

    @property
    def domain(self) -> Domain:
        return domain_from_descriptor(self.field)

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return dataclasses.replace(self, seed=int(seed))

    @property
    def uses_randomness(self) -> bool:
        return self.preset == "free_random_perm"

    def preset_params(self) -> dict:
        """Preset parameters with the top-level seed filled in."""
        params = dict(self.params)
        if self.uses_randomness:
            params["seed"] = self.seed
            params.setdefault("rank", self.rank)
        return params


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

class _Reader:
    """Turns validation failures into ConfigErrors carrying a path and, when
    the offending value can be found in the source text, its line and column."""

    def __init__(self, text: str | None):
        self.text = text

    def locate(self, value) -> tuple[int | None, int | None]:
        if self.text is None or value is None or isinstance(value, (dict, list)):
            return None, None
        needle = json.dumps(value)
        idx = self.text.find(needle)
        if idx < 0:
            return None, None
        line = self.text.count("\n", 0, idx) + 1
        col = idx - (self.text.rfind("\n", 0, idx) + 1) + 1
        return line, col

    def fail(self, path: str, message: str, value=None, offset: int = 0):
        line, col = self.locate(value)
        if col is not None and isinstance(value, str):
            col += 1 + offset
        raise ConfigError(message, path, line, col)

    def integer(self, v, path: str, minimum: int | None = None) -> int:
        if isinstance(v, bool) or not isinstance(v, (int, str)):
            self.fail(path, "expected an integer (as a string or JSON integer)", v)
        try:
            n = int(v)
        except ValueError:
            self.fail(path, f"not an integer: {v!r}", v)
        if minimum is not None and n < minimum:
            self.fail(path, f"must be at least {minimum}", v)
        return n

    def rational(self, v, path: str) -> Fraction:
        if isinstance(v, bool) or not isinstance(v, (int, str)):
            self.fail(path, "expected an exact rational written as a string", v)
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            self.fail(path, f"not an exact rational: {v!r} ({exc})", v)

    def string(self, v, path: str) -> str:
        if not isinstance(v, str):
            self.fail(path, "expected a string", v)
        return v

    def array(self, v, path: str) -> list:
        if not isinstance(v, list):
            self.fail(path, "expected an array", v)
        return v

    def obj(self, v, path: str) -> dict:
        if not isinstance(v, dict):
            self.fail(path, "expected an object", v)
        return v


def _int_tree(r: _Reader, v, path):
    """Preset parameters: nested lists of integers, kept as Python ints."""
    if isinstance(v, list):
        return [_int_tree(r, x, f"{path}[{i}]") for i, x in enumerate(v)]
    return r.integer(v, path)


def _prime(r: _Reader, v, path) -> PrimeIdeal:
    if isinstance(v, dict):
        p = r.integer(v.get("p"), f"{path}.p", 2)
        gbar = v.get("gbar")
        if gbar is None:
            return PrimeIdeal(p)
        return PrimeIdeal(p, tuple(r.integer(c, f"{path}.gbar[{i}]") % p
                                   for i, c in enumerate(r.array(gbar, f"{path}.gbar"))))
    return PrimeIdeal(r.integer(v, path, 2))


def _field(r: _Reader, v) -> dict:
    v = r.obj(v, "$.field")
    kind = v.get("kind")
    if kind == "rationals":
        return {"kind": "rationals"}
    if kind == "number_field":
        mp = [r.integer(c, f"$.field.minpoly[{i}]") for i, c in enumerate(r.array(v.get("minpoly"), "$.field.minpoly"))]
        out: dict[str, Any] = {"kind": "number_field", "minpoly": mp}
        if v.get("conjugation") is not None:
            out["conjugation"] = [r.rational(c, f"$.field.conjugation[{i}]")
                                  for i, c in enumerate(r.array(v["conjugation"], "$.field.conjugation"))]
        return out
    if kind == "function_field":
        names = [r.string(x, f"$.field.variables[{i}]")
                 for i, x in enumerate(r.array(v.get("variables", ["t"]), "$.field.variables"))]
        return {"kind": "function_field", "variables": names}
    r.fail("$.field.kind", f"unknown field kind {kind!r}", kind)


def parse_config(document: str | dict) -> ExperimentConfig:
    """Parse and validate a configuration document (JSON text or an already loaded dict)."""
    if isinstance(document, str):
        try:
            raw = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg}", "$", exc.lineno, exc.colno) from None
        r = _Reader(document)
    else:
        raw = document
        r = _Reader(None)
    raw = r.obj(raw, "$")
    unknown = sorted(set(raw) - _KEYS)
    if unknown:
        r.fail(f"$.{unknown[0]}", "unknown key", unknown[0])

    fdesc = _field(r, raw.get("field", {"kind": "rationals"}))
    try:
        domain = domain_from_descriptor(fdesc)
    except (ValueError, SoficRankError) as exc:
        raise ConfigError(str(exc), "$.field") from None
    rank = r.integer(raw.get("rank", 2), "$.rank", 1)

    rows = r.array(raw.get("matrix"), "$.matrix")
    if not rows:
        r.fail("$.matrix", "matrix must have at least one row")
    matrix = []
    for i, row in enumerate(rows):
        row = r.array(row, f"$.matrix[{i}]")
        if len(row) != len(rows[0]) or not row:
            r.fail(f"$.matrix[{i}]", "rows must be non-empty and of equal length")
        matrix.append(tuple(r.string(x, f"$.matrix[{i}][{j}]") for j, x in enumerate(row)))
    matrix = tuple(matrix)
    for i, row in enumerate(matrix):
        for j, text in enumerate(row):
            try:
                GAMatrix.parse([[text]], domain, rank)
            except ParseError as exc:
                r.fail(f"$.matrix[{i}][{j}]", str(exc), text, exc.position or 0)
            except SoficRankError as exc:
                r.fail(f"$.matrix[{i}][{j}]", str(exc), text)

    rep = None
    if raw.get("representation") is not None:
        rv = r.obj(raw["representation"], "$.representation")
        mats = r.array(rv.get("matrices"), "$.representation.matrices")
        if len(mats) != rank:
            r.fail("$.representation.matrices", f"need one matrix per generator ({rank})")
        parsed = []
        k = None
        for g, M in enumerate(mats):
            path = f"$.representation.matrices[{g}]"
            M = r.array(M, path)
            k = len(M) if k is None else k
            if len(M) != k or not k:
                r.fail(path, "all generator matrices must be k x k with the same k")
            out = []
            for s, row in enumerate(M):
                row = r.array(row, f"{path}[{s}]")
                if len(row) != k:
                    r.fail(f"{path}[{s}]", f"expected {k} entries")
                entries = []
                for t, x in enumerate(row):
                    x = r.string(x, f"{path}[{s}][{t}]") if not isinstance(x, int) else str(x)
                    try:
                        domain.parse(x)
                    except ParseError as exc:
                        r.fail(f"{path}[{s}][{t}]", str(exc), x, exc.position or 0)
                    entries.append(x)
                out.append(tuple(entries))
            parsed.append(tuple(out))
        relators = []
        for i, w in enumerate(r.array(rv.get("relators", []), "$.representation.relators")):
            w = r.string(w, f"$.representation.relators[{i}]")
            try:
                parse_word(w, rank)
            except SoficRankError as exc:
                r.fail(f"$.representation.relators[{i}]", str(exc), w)
            relators.append(w)
        rep = RepresentationSpec(tuple(parsed), tuple(relators))

    av = r.obj(raw.get("approximation"), "$.approximation")
    preset = r.string(av.get("preset"), "$.approximation.preset")
    if preset not in PRESETS:
        r.fail("$.approximation.preset", f"unknown preset {preset!r}", preset)
    params = {}
    for key, val in sorted(r.obj(av.get("params", {}), "$.approximation.params").items()):
        params[key] = _int_tree(r, val, f"$.approximation.params.{key}")

    seed = None if raw.get("seed") is None else r.integer(raw["seed"], "$.seed")
    if preset == "free_random_perm":
        if "seed" in params:
            if seed is not None and seed != params["seed"]:
                r.fail("$.approximation.params.seed", "conflicts with the top-level seed")
            seed = params.pop("seed")
        if seed is None:
            r.fail("$.seed", "a seed is mandatory for the random preset")
        if params.setdefault("rank", rank) != rank:
            r.fail("$.approximation.params.rank", "does not match $.rank")
    if preset == "zd_congruence" and params.get("d") != rank:
        r.fail("$.approximation.params.d", f"d must equal the alphabet rank {rank}")
    if preset in ("finite_regular", "finite_quotient"):
        gens = params.get("generators")
        if not isinstance(gens, list) or len(gens) != rank:
            r.fail("$.approximation.params.generators", f"need one permutation per generator ({rank})")
    if preset == "sigma_image":
        if rep is None:
            r.fail("$.approximation", "sigma_image needs a representation")
        if not params.get("primes"):
            r.fail("$.approximation.params.primes", "sigma_image needs a list of primes")

    limit = None if raw.get("limit") is None else r.rational(raw["limit"], "$.limit")

    checks = tuple(r.string(c, f"$.checks[{i}]") for i, c in enumerate(r.array(raw.get("checks", ["convergence"]), "$.checks")))
    for i, c in enumerate(checks):
        if c not in CHECKS:
            r.fail(f"$.checks[{i}]", f"unknown check {c!r}", c)
    if "twisted" in checks and rep is None:
        r.fail("$.checks", "the twisted check needs a representation")
    if "modp_bound" in checks and not isinstance(domain, (Rationals, NumberField)):
        r.fail("$.checks", "the mod-p sweep needs Q or a number field")
    if "semicontinuity" in checks and not isinstance(domain, FunctionField):
        r.fail("$.checks", "the semicontinuity check needs a function field")

    primes = PrimeSpec()
    if raw.get("primes") is not None:
        pv = r.obj(raw["primes"], "$.primes")
        primes = PrimeSpec(
            r.integer(pv.get("count", 5), "$.primes.count", 0),
            r.integer(pv.get("min", 2), "$.primes.min", 2),
            r.integer(pv.get("max_degree", 1), "$.primes.max_degree", 1),
            tuple(_prime(r, p, f"$.primes.list[{i}]") for i, p in enumerate(r.array(pv.get("list", []), "$.primes.list"))),
        )
    residue = None if raw.get("residue") is None else _prime(r, raw["residue"], "$.residue")

    moments_L = 4
    if raw.get("moments") is not None:
        moments_L = r.integer(r.obj(raw["moments"], "$.moments").get("L", 4), "$.moments.L", 0)

    points = []
    if raw.get("specialization") is not None:
        sv = r.obj(raw["specialization"], "$.specialization")
        nvars = len(fdesc.get("variables", ["t"]))
        for i, pt in enumerate(r.array(sv.get("points", []), "$.specialization.points")):
            pt = r.array(pt, f"$.specialization.points[{i}]")
            if len(pt) != nvars:
                r.fail(f"$.specialization.points[{i}]", f"expected {nvars} coordinates")
            points.append(tuple(r.rational(x, f"$.specialization.points[{i}][{j}]") for j, x in enumerate(pt)))
    if "semicontinuity" in checks and not points:
        r.fail("$.specialization.points", "the semicontinuity check needs at least one point")

    caps = {}
    cap_names = set(Caps.__dataclass_fields__)
    for key, val in sorted(r.obj(raw.get("caps", {}), "$.caps").items()):
        if key not in cap_names:
            r.fail(f"$.caps.{key}", "unknown cap", key)
        caps[key] = r.integer(val, f"$.caps.{key}", 1)

    name = r.string(raw.get("name", ""), "$.name")
    return ExperimentConfig(matrix, preset, params, name, fdesc, rank, rep, limit, checks, primes,
                            residue, moments_L, tuple(points), seed, caps)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _strings(v):
    if isinstance(v, list):
        return [_strings(x) for x in v]
    if isinstance(v, dict):
        return {k: _strings(x) for k, x in v.items()}
    if isinstance(v, (int, Fraction)) and not isinstance(v, bool):
        return str(v)
    return v


def _prime_doc(P: PrimeIdeal):
    if P.gbar is None:
        return str(P.p)
    return {"p": str(P.p), "gbar": [str(c) for c in P.gbar]}


def serialize(config: ExperimentConfig) -> dict:
    """The canonical document: every number a string, defaults written out."""
    doc: dict[str, Any] = {
        "name": config.name,
        "field": _strings(config.field),
        "rank": str(config.rank),
        "matrix": [list(r) for r in config.matrix],
        "approximation": {"preset": config.preset, "params": _strings(config.params)},
        "checks": list(config.checks),
        "primes": {
            "count": str(config.primes.count),
            "min": str(config.primes.min_p),
            "max_degree": str(config.primes.max_degree),
            "list": [_prime_doc(P) for P in config.primes.explicit],
        },
        "moments": {"L": str(config.moments_L)},
        "specialization": {"points": [[str(x) for x in pt] for pt in config.points]},
        "caps": _strings(config.caps),
    }
    if config.representation is not None:
        doc["representation"] = {
            "matrices": [[list(r) for r in M] for M in config.representation.matrices],
            "relators": list(config.representation.relators),
        }
    if config.limit is not None:
        doc["limit"] = str(config.limit)
    if config.residue is not None:
        doc["residue"] = _prime_doc(config.residue)
    if config.seed is not None:
        doc["seed"] = str(config.seed)
    return doc


def canonical_json(config: ExperimentConfig) -> str:
    return json.dumps(serialize(config), sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def dumps(config: ExperimentConfig) -> str:
    return json.dumps(serialize(config), sort_keys=True, indent=2) + "\n"


def config_hash(config: ExperimentConfig) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()
