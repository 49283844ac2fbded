"""Experiment runners.  Each returns a :class:`RunRecord` of exact rows."""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from ..caps import override_caps
from ..coeff import NumberField, PrimeIdeal, Rationals, enumerate_primes
from ..errors import (BallTooLarge, DenominatorVanishes, DomainMismatch, PrimeDividesDenominator,
                      RepresentationInvalid)
from ..freealg import GAMatrix, parse_word
from ..rank import (discrepancy_bound, gap_within_bound, normalized_rank, normalized_rank_mod,
                    reduce_gamatrix)
from ..sofic import (Approximation, defect_profile, free_oracle, preset_approximation,
                     regular_action_of_image)
from ..spectra import hankel_psd, moments_finite, moments_free, specialize
from ..twist import Representation, stabilizers_act_trivially, twist_matrix, validate_rep
from .config import ExperimentConfig, config_hash, serialize

CSV_COLUMNS = ("step", "set_size", "field", "rank_num", "rank_den", "check",
               "gap_num", "gap_den", "bound", "verdict", "ms")
PASS, FAIL, NONE = "pass", "fail", "-"


@dataclass
class Row:
    step: int
    set_size: int
    field: str
    check: str
    rank: Fraction | None = None
    gap: Fraction | None = None
    bound: float | None = None
    verdict: str = NONE
    ms: float = 0.0

    def cells(self, timings: bool = False) -> list[str]:
        def num(q):
            return ("", "") if q is None else (str(q.numerator), str(q.denominator))

        rn, rd = num(self.rank)
        gn, gd = num(self.gap)
        bound = "" if self.bound is None else repr(float(self.bound))
        ms = f"{self.ms:.1f}" if timings else ""
        return [str(self.step), str(self.set_size), self.field, rn, rd, self.check, gn, gd,
                bound, self.verdict, ms]


@dataclass
class RunRecord:
    config_hash: str
    config: dict
    rows: list[Row] = field(default_factory=list)
    moment_rows: list[tuple] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def add(self, row: Row) -> None:
        self.rows.append(row)

    def extend(self, other: "RunRecord") -> None:
        self.rows.extend(other.rows)
        self.moment_rows.extend(other.moment_rows)
        self.notes.extend(other.notes)
        self.summary.update(other.summary)

    @property
    def failures(self) -> list[Row]:
        return [r for r in self.rows if r.verdict == FAIL]

    @property
    def passed(self) -> bool:
        return not self.failures


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------

def build_matrix(config: ExperimentConfig) -> GAMatrix:
    return GAMatrix.parse([list(r) for r in config.matrix], config.domain, config.rank)


def build_representation(config: ExperimentConfig) -> Representation | None:
    spec = config.representation
    if spec is None:
        return None
    return Representation.parse([[list(r) for r in M] for M in spec.matrices], config.domain)


def build_approximation(config: ExperimentConfig, sigma: Representation | None = None) -> Approximation:
    if config.preset == "sigma_image":
        sigma = sigma or build_representation(config)
        fsets = [regular_action_of_image(sigma.reduce(PrimeIdeal(p))) for p in config.params["primes"]]
        # every point stabilizer is the kernel of sigma mod p
        return Approximation("sigma_image", config.rank, fsets, None, free_action=True, params=config.params)
    return preset_approximation(config.preset, config.preset_params(), config.rank)


def _rank_job(args):
    B, X, P = args
    return normalized_rank(B, X) if P is None else normalized_rank_mod(B, X, P)


def _map_ranks(jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [_rank_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_rank_job, jobs))


def _ms(report) -> float:
    return report.elapsed * 1000.0


def _record(config: ExperimentConfig) -> RunRecord:
    return RunRecord(config_hash(config), serialize(config))


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def run_convergence(config: ExperimentConfig, workers: int = 1) -> RunRecord:
    """``rk_X(A)`` along the series; exact gaps when a limit is known."""
    with override_caps(**config.caps):
        A = build_matrix(config)
        approx = build_approximation(config)
        reports = _map_ranks([(A, X, None) for X in approx.fsets], workers)
    rec = _record(config)
    limit = config.limit
    if limit is None and approx.exact_limit and reports:
        limit = reports[0].normalized
    for step, (X, rep) in enumerate(zip(approx.fsets, reports), 1):
        gap = None if limit is None else limit - rep.normalized
        verdict = NONE
        if approx.exact_limit:
            verdict = PASS if gap == 0 else FAIL
        rec.add(Row(step, X.size, rep.field, "convergence", rep.normalized, gap, None, verdict, _ms(rep)))
    if limit is not None:
        rec.summary["convergence_limit"] = str(limit)
        rec.summary["convergence_last_gap"] = str(rec.rows[-1].gap) if rec.rows else ""
    return rec


def run_twisted_check(config: ExperimentConfig, workers: int = 1) -> RunRecord:
    """``rk_X(twist(A))`` against ``k rk_X(A)`` at every step.

    Steps where every point stabilizer acts trivially through sigma are
    flagged exact: there the difference must vanish.
    """
    with override_caps(**config.caps):
        A = build_matrix(config)
        sigma = build_representation(config)
        approx = build_approximation(config, sigma)
        relators = [parse_word(w, config.rank) for w in config.representation.relators]
        relators += approx.relators
        bad = validate_rep(sigma, relators)
        if bad:
            raise RepresentationInvalid(f"representation violates {len(bad)} relator(s)", bad)
        P = config.residue
        if P is not None:
            A = reduce_gamatrix(A, P)
            sigma = sigma.reduce(P)
        At = twist_matrix(A, sigma)
        k = sigma.dim
        jobs = []
        for X in approx.fsets:
            jobs += [(A, X, None), (At, X, None)]
        reports = _map_ranks(jobs, workers)
        exact = [stabilizers_act_trivially(X, sigma) for X in approx.fsets]
    rec = _record(config)
    diffs = []
    for step, X in enumerate(approx.fsets, 1):
        base, tw = reports[2 * step - 2], reports[2 * step - 1]
        diff = tw.normalized - k * base.normalized
        diffs.append(diff)
        rec.add(Row(step, X.size, base.field, "base", base.normalized, None, None, NONE, _ms(base)))
        verdict = (PASS if diff == 0 else FAIL) if exact[step - 1] else NONE
        rec.add(Row(step, X.size, tw.field, "twisted", tw.normalized, diff, None, verdict, _ms(tw)))
    tail = diffs[len(diffs) // 2:]
    rec.summary["twisted_k"] = str(k)
    rec.summary["twisted_tail_max_abs_diff"] = str(max((abs(d) for d in tail), default=Fraction(0)))
    rec.summary["twisted_exact_steps"] = str(sum(exact))
    return rec


def _sweep_primes(config: ExperimentConfig) -> list[PrimeIdeal]:
    if config.primes.explicit:
        return list(config.primes.explicit)
    spec = config.primes
    return enumerate_primes(config.domain, spec.count, spec.min_p, spec.max_degree)


def run_modp_sweep(config: ExperimentConfig, workers: int = 1) -> RunRecord:
    """Rational against mod-P ranks with the discrepancy bound for every (X, P)."""
    rec = _record(config)
    with override_caps(**config.caps):
        A = build_matrix(config)
        if not isinstance(A.domain, (Rationals, NumberField)):
            raise DomainMismatch("the mod-p sweep needs Q or a number field")
        approx = build_approximation(config)
        primes = []
        for P in _sweep_primes(config):
            try:
                reduce_gamatrix(A, P)
            except PrimeDividesDenominator as exc:
                rec.notes.append(f"skipped p={P.p}: {exc}")
                continue
            primes.append(P)
        jobs = []
        for X in approx.fsets:
            jobs.append((A, X, None))
            jobs += [(A, X, P) for P in primes]
        reports = _map_ranks(jobs, workers)
    per = 1 + len(primes)
    for step, X in enumerate(approx.fsets, 1):
        chunk = reports[(step - 1) * per: step * per]
        rat = chunk[0]
        rec.add(Row(step, X.size, rat.field, "rational", rat.normalized, None, None, NONE, _ms(rat)))
        for P, rep in zip(primes, chunk[1:]):
            gap = rat.normalized - rep.normalized
            bound = discrepancy_bound(A, P.size)
            ok = gap >= 0 and gap_within_bound(gap, A, P.size)
            rec.add(Row(step, X.size, rep.field, "modp", rep.normalized, gap, bound,
                        PASS if ok else FAIL, _ms(rep)))
    rec.summary["modp_primes"] = " ".join(str(P.p) if P.gbar is None else f"{P.p}:{list(P.gbar)}"
                                          for P in primes)
    return rec


def run_moments(config: ExperimentConfig, workers: int = 1) -> RunRecord:
    """Finite moments against the free-group moments with Hankel positivity."""
    rec = _record(config)
    L = config.moments_L
    with override_caps(**config.caps):
        A = build_matrix(config)
        approx = build_approximation(config)
        ref = moments_free(A, L)
        rec.moment_rows += ref.rows()
        ref_ok = hankel_psd(ref.values)
        radius = 2 * L * max(A.max_word_length(), 1)
        for step, X in enumerate(approx.fsets, 1):
            t0 = time.perf_counter()
            mu = moments_finite(A, X, L)
            rec.moment_rows += [(l, a, b, f"step{step}:{X.size}") for l, a, b, _ in mu.rows()]
            dev = max(abs(a - b) for a, b in zip(mu.values, ref.values))
            try:
                defect = defect_profile(X, radius, free_oracle).max_deviation
            except BallTooLarge:
                defect = None
                rec.notes.append(f"step {step}: defect not measured, ball of radius {radius} too large")
            ok = ref_ok and hankel_psd(mu.values) and all(v >= 0 for v in mu.values)
            if defect == 0 and dev != 0:
                ok = False
            ms = (time.perf_counter() - t0) * 1000.0
            rec.add(Row(step, X.size, A.domain.label, "moments", None, dev, None, PASS if ok else FAIL, ms))
    rec.summary["moments_free"] = " ".join(str(v) for v in ref.values)
    return rec


def run_semicontinuity(config: ExperimentConfig, workers: int = 1) -> RunRecord:
    """Generic rank over the function field against every specialization."""
    rec = _record(config)
    with override_caps(**config.caps):
        C = build_matrix(config)
        approx = build_approximation(config)
        specials = []
        for pt in config.points:
            try:
                specials.append((pt, specialize(C, pt)))
            except DenominatorVanishes as exc:
                rec.notes.append(f"skipped point {tuple(map(str, pt))}: {exc}")
        jobs = []
        for X in approx.fsets:
            jobs.append((C, X, None))
            jobs += [(S, X, None) for _, S in specials]
        reports = _map_ranks(jobs, workers)
    per = 1 + len(specials)
    for step, X in enumerate(approx.fsets, 1):
        chunk = reports[(step - 1) * per: step * per]
        gen = chunk[0]
        rec.add(Row(step, X.size, gen.field, "generic", gen.normalized, None, None, NONE, _ms(gen)))
        for (pt, _), rep in zip(specials, chunk[1:]):
            gap = gen.normalized - rep.normalized
            rec.add(Row(step, X.size, rep.field, "semicontinuity", rep.normalized, gap, None,
                        PASS if gap >= 0 else FAIL, _ms(rep)))
    return rec


RUNNERS = {
    "convergence": run_convergence,
    "twisted": run_twisted_check,
    "modp_bound": run_modp_sweep,
    "moments": run_moments,
    "semicontinuity": run_semicontinuity,
}


def run(config: ExperimentConfig, workers: int = 1) -> RunRecord:
    """Run every configured check, in the configured order, into one record."""
    rec = _record(config)
    for name in config.checks:
        rec.extend(RUNNERS[name](config, workers))
    rec.summary["verdict"] = PASS if rec.passed else FAIL
    return rec
