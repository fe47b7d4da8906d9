"""Density Service - the empirical harness over Riemann-Roch boxes"""
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from ffdensity.algebra.holomorphy import (
    DivisorOnT,
    HolomorphySpec,
    chain_divisor,
    ell,
    enumerate_box,
    format_divisor,
    format_spec,
    parse_divisor,
    parse_spec,
    sample_tuple,
)
from ffdensity.algebra.places import Place, count_places_of_degree, format_place
from ffdensity.config.settings import Settings, get_settings
from ffdensity.constants import (
    MODE_EXHAUSTIVE,
    MODE_SAMPLE,
    MONOTONE_WINDOW,
    PREDICATE_CONGRUENCE,
    PREDICATE_RAMIFIED,
)
from ffdensity.densities.eisenstein import ramified_density_truncated
from ffdensity.exceptions import CapExceededError, FFDensityError, InvariantError, UsageError
from ffdensity.models.experiment import DensityExperiment, PredicateSpec
from ffdensity.models.report import ChainPointReport, ConvergenceSummary, DensityReport
from ffdensity.services.predicates import build_predicate
from ffdensity.utils.formatting import format_rational, parse_rational

logger = logging.getLogger(__name__)

# ranges handed to each worker
CHUNKS_PER_WORKER = 4


def _count_exhaustive(predicate, elements: Sequence, arity: int, start: int, stop: int) -> int:
    """Hits among tuple indices [start, stop); coordinate j is digit j of the index in base |L(D)|"""
    size = len(elements)
    hits = 0
    for index in range(start, stop):
        values = []
        for _ in range(arity):
            index, r = divmod(index, size)
            values.append(elements[r])
        if predicate(values):
            hits += 1
    return hits


def _count_sampled(predicate, D: DivisorOnT, spec: HolomorphySpec, seed: int, stream: int,
                   arity: int, start: int, stop: int) -> int:
    """Hits among samples [start, stop); sample i is drawn from the generator of (seed, stream, i)"""
    hits = 0
    for i in range(start, stop):
        values = sample_tuple(D, spec, seed, i, arity, stream)
        if predicate(values):
            hits += 1
    return hits


def _partition(total: int, parts: int) -> List[Tuple[int, int]]:
    parts = max(1, min(parts, total))
    step, extra = divmod(total, parts)
    ranges, start = [], 0
    for i in range(parts):
        stop = start + step + (1 if i < extra else 0)
        ranges.append((start, stop))
        start = stop
    return ranges


def pattern_measure_truncated(measure_by_degree: Callable[[int], Fraction], pattern: Sequence[Place],
                              spec: HolomorphySpec, t: int) -> Fraction:
    """(prod over P in pattern of mu_P) * prod over other P in S with deg P <= t of (1 - mu_P)

    The density of tuples whose set of local events among places of degree <= t
    is exactly `pattern`; an empty pattern gives the complement product.
    """
    if t < 1:
        raise UsageError(f"Truncation degree must be >= 1, got {t}")
    pattern = list(dict.fromkeys(pattern))
    for P in pattern:
        if not spec.in_S(P):
            raise UsageError(f"Pattern place {format_place(P)} is excluded from S")
        if P.degree > t:
            raise UsageError(f"Pattern place {format_place(P)} has degree above t={t}")
    value = Fraction(1)
    for P in pattern:
        value *= measure_by_degree(P.degree)
    for d in range(1, t + 1):
        others = count_places_of_degree(spec.field, d, spec.excluded) - sum(1 for P in pattern if P.degree == d)
        if others:
            value *= (1 - measure_by_degree(d)) ** others
    return value


class DensityService:
    """Evaluate predicates over L(D)^d along a divisor chain"""

    def __init__(self, settings: Optional[Settings] = None, workers: int = 1):
        if workers < 1:
            raise UsageError(f"Worker count must be >= 1, got {workers}")
        self.settings = settings or get_settings()
        self.workers = workers
        logger.debug(f"DensityService initialized with {workers} worker(s)")

    def _reduce_counts(self, fn, jobs: List[tuple]) -> int:
        if self.workers == 1 or len(jobs) == 1:
            return sum(fn(*job) for job in jobs)
        total = 0
        with ProcessPoolExecutor(max_workers=self.workers) as executor:
            futures = [executor.submit(fn, *job) for job in jobs]
            for future in as_completed(futures):
                total += future.result()
        return total

    def _chain(self, experiment: DensityExperiment, spec: HolomorphySpec) -> List[DivisorOnT]:
        if experiment.chain:
            chain = [parse_divisor(spec, text) for text in experiment.chain]
        else:
            chain = [chain_divisor(spec, j) for j in range(experiment.j_min, experiment.j_max + 1)]
        for a, b in zip(chain, chain[1:]):
            if not (a <= b and a.degree < b.degree):
                logger.warning(f"Chain rejected: {format_divisor(a)} does not precede {format_divisor(b)}")
                raise UsageError(f"Chain must be strictly increasing: {format_divisor(a)} then {format_divisor(b)}")
        return chain

    def _point(self, experiment: DensityExperiment, predicate, spec: HolomorphySpec,
               D: DivisorOnT, chain_index: int, seed: int, reference: Optional[Fraction]) -> ChainPointReport:
        arity = experiment.arity
        box = ell(D)
        if experiment.mode == MODE_EXHAUSTIVE:
            total = spec.q ** (box * arity)
            cap = experiment.cap or self.settings.max_enum
            if total > cap:
                logger.warning(f"Exhaustive run rejected at {format_divisor(D)}: {total} tuples exceed cap {cap}")
                raise CapExceededError(
                    f"L({format_divisor(D)})^{arity} has {total} tuples, above the cap {cap}; use sample mode"
                )
            elements = list(enumerate_box(D, spec, cap=self.settings.max_box))
            jobs = [(predicate, elements, arity, start, stop)
                    for start, stop in _partition(total, self.workers * CHUNKS_PER_WORKER)]
            hits = self._reduce_counts(_count_exhaustive, jobs)
            std_error = None
        else:
            total = experiment.samples
            jobs = [(predicate, D, spec, seed, chain_index, arity, start, stop)
                    for start, stop in _partition(total, self.workers * CHUNKS_PER_WORKER)]
            hits = self._reduce_counts(_count_sampled, jobs)
            p = hits / total
            std_error = math.sqrt(p * (1 - p) / total)
        ratio = Fraction(hits, total)
        if not 0 <= ratio <= 1:
            raise InvariantError(f"Ratio {ratio} outside [0, 1]")
        return ChainPointReport(
            chain_index=chain_index,
            divisor=format_divisor(D),
            degree=D.degree,
            ell=box,
            hits=hits,
            total=total,
            ratio=format_rational(ratio),
            ratio_float=float(ratio),
            std_error=std_error,
            reference=format_rational(reference) if reference is not None else None,
            gap=format_rational(abs(ratio - reference)) if reference is not None else None,
        )

    def _notes(self, experiment: DensityExperiment, spec: HolomorphySpec) -> List[str]:
        notes = []
        predicate = experiment.predicate
        if predicate.name == PREDICATE_RAMIFIED:
            truncated = ramified_density_truncated(predicate.n, spec, predicate.t_scan)
            notes.append(
                f"place scan truncated at degree {predicate.t_scan}; the estimate targets the truncated product "
                f"{format_rational(truncated)} (~{float(truncated):.6f}); truncation bias against the full "
                f"density is nonnegative and has no effective bound"
            )
        if predicate.name == PREDICATE_CONGRUENCE:
            bound = "unbounded" if predicate.t_max is None else str(predicate.t_max)
            notes.append(f"congruence places scanned with {predicate.t} < deg P <= {bound}")
        if experiment.mode == MODE_SAMPLE:
            notes.append("sample mode: standard errors follow the binomial model")
        return notes

    def run(self, experiment: DensityExperiment) -> DensityReport:
        """
        Evaluate the experiment at every chain point

        Exhaustive hit counts are exact over L(D)^d; sample mode is a pure
        function of (experiment, seed) whatever the worker count.

        Raises:
            UsageError: malformed spec, divisors or predicate parameters
            CapExceededError: exhaustive box power above the cap
        """
        start_time = time.time()
        try:
            spec = parse_spec(experiment.spec)
            seed = experiment.seed if experiment.seed is not None else self.settings.default_seed
            logger.debug(f"Running {experiment.predicate.name} over {format_spec(spec)}, mode {experiment.mode}")
            predicate = build_predicate(experiment.predicate, spec)
            chain = self._chain(experiment, spec)
            reference = parse_rational(experiment.reference) if experiment.reference is not None else None
            start_index = 0 if experiment.chain else experiment.j_min
            points = [
                self._point(experiment, predicate, spec, D, start_index + i, seed, reference)
                for i, D in enumerate(chain)
            ]
            report = DensityReport(
                predicate=experiment.predicate.name,
                spec=format_spec(spec),
                mode=experiment.mode,
                arity=experiment.arity,
                seed=seed if experiment.mode == MODE_SAMPLE else None,
                reference=format_rational(reference) if reference is not None else None,
                points=points,
                notes=self._notes(experiment, spec),
            )
            elapsed_time = time.time() - start_time
            logger.info(f"Density run finished - predicate: {experiment.predicate.name}, "
                        f"points: {len(points)}, time: {elapsed_time:.2f}s")
            return report
        except FFDensityError as fe:
            elapsed_time = time.time() - start_time
            logger.warning(f"Density run rejected: {str(fe)}, time: {elapsed_time:.2f}s")
            raise
        except Exception as e:
            elapsed_time = time.time() - start_time
            logger.error(f"Density run failed: {str(e)}, time: {elapsed_time:.2f}s", exc_info=True)
            raise InvariantError(f"Density run failed: {str(e)}") from e

    def tail_density(self, f_desc: str, g_desc: str, d: int, t: int, D: DivisorOnT, spec: HolomorphySpec,
                     mode: str = MODE_EXHAUSTIVE, t_max: Optional[int] = None, seed: Optional[int] = None,
                     samples: int = 10_000) -> Fraction:
        """Share of d-tuples in L(D)^d with f = g = 0 mod some P in S, t < deg P <= t_max"""
        predicate = PredicateSpec(name=PREDICATE_CONGRUENCE, f=f_desc, g=g_desc, t=t, t_max=t_max, d=d)
        experiment = DensityExperiment(
            predicate=predicate,
            spec=format_spec(spec),
            chain=[format_divisor(D)],
            mode=mode,
            seed=seed,
            samples=samples,
        )
        report = self.run(experiment)
        return parse_rational(report.points[0].ratio)

    def compare(self, report: DensityReport) -> ConvergenceSummary:
        """Gaps |ratio - reference| and whether they are nonincreasing over the last chain points"""
        if not report.points:
            return ConvergenceSummary(reference=report.reference)
        if report.reference is None:
            raise UsageError("Comparison needs a reference value")
        reference = parse_rational(report.reference)
        gaps = [abs(parse_rational(p.ratio) - reference) for p in report.points]
        window = gaps[-MONOTONE_WINDOW:]
        monotone = all(a >= b for a, b in zip(window, window[1:]))
        logger.debug(f"Compared {len(gaps)} chain points, final gap {float(gaps[-1]):.6f}")
        return ConvergenceSummary(
            reference=report.reference,
            gaps=[format_rational(g) for g in gaps],
            gap_floats=[float(g) for g in gaps],
            final_gap=format_rational(gaps[-1]),
            eventually_monotone=monotone,
        )
