"""Measure Service - exact densities, local measures and zeta values as output records"""
import logging
import time
from typing import Dict, Optional

import mpmath

from ffdensity.algebra.holomorphy import HolomorphySpec, format_spec
from ffdensity.algebra.places import Place, format_place, format_rational_function, places_of_degree
from ffdensity.config.settings import Settings, get_settings
from ffdensity.constants import BRANCH_SHIFT
from ffdensity.densities.eisenstein import (
    PolyOverF,
    is_eisenstein,
    local_measure_U,
    local_measure_U_bruteforce,
    ramified_branch,
    ramified_density_approx,
    ramified_density_truncated,
)
from ffdensity.densities.unimodular import (
    PolyMatrix,
    is_unimodular,
    local_nonunimodular_bruteforce,
    local_nonunimodular_measure,
    maximal_minors,
    unimodular_density_exact,
)
from ffdensity.densities.zeta import (
    LPolynomial,
    euler_tail_bound,
    zeta_H,
    zeta_H_euler_truncated,
    zeta_H_euler_truncated_approx,
)
from ffdensity.exceptions import CapExceededError, FFDensityError, InvariantError
from ffdensity.utils.formatting import format_rational

logger = logging.getLogger(__name__)

APPROX_DIGITS = 20


class MeasureService:
    """Closed forms and their brute-force oracles, with caps from settings"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        logger.debug("MeasureService initialized")

    def _timed(self, label: str, compute) -> Dict:
        start_time = time.time()
        try:
            logger.debug(f"Computing {label}")
            result = compute()
            elapsed_time = time.time() - start_time
            logger.info(f"{label} computed, time: {elapsed_time:.2f}s")
            return result
        except FFDensityError as fe:
            elapsed_time = time.time() - start_time
            logger.warning(f"{label} rejected: {str(fe)}, time: {elapsed_time:.2f}s")
            raise
        except Exception as e:
            elapsed_time = time.time() - start_time
            logger.error(f"{label} failed: {str(e)}, time: {elapsed_time:.2f}s", exc_info=True)
            raise InvariantError(f"{label} failed: {str(e)}") from e

    def places(self, spec: HolomorphySpec, d: int) -> Dict:
        def compute():
            found = places_of_degree(spec.field, d, spec.excluded)
            return {"degree": d, "count": len(found), "places": [format_place(P) for P in found]}
        return self._timed(f"places of degree {d}", compute)

    def eisenstein(self, f: PolyOverF, P: Place, details: bool = False) -> Dict:
        def compute():
            record = {"eisenstein": is_eisenstein(f, P)}
            if details:
                hit = ramified_branch(f, P)
                record["in_U_P"] = hit is not None
                record["branch"] = hit.branch if hit is not None else None
                record["witness"] = (format_rational_function(hit.witness)
                                     if hit is not None and hit.branch == BRANCH_SHIFT else None)
            return record
        return self._timed(f"Eisenstein test at {format_place(P)}", compute)

    def ramified_density(self, n: int, spec: HolomorphySpec, t: int) -> Dict:
        """Exact truncated product, or its 50-digit approximation when the exact one is too large"""
        def compute():
            try:
                value = ramified_density_truncated(n, spec, t, self.settings.max_exact_bits)
                return {"density": format_rational(value)}
            except CapExceededError:
                logger.info(f"Falling back to approximate ramified density at t={t}")
                approx = ramified_density_approx(n, spec, t)
                return {"density_approx": mpmath.nstr(approx, APPROX_DIGITS)}
        return self._timed(f"ramified density n={n}, t={t} over {format_spec(spec)}", compute)

    def unimodular(self, M: PolyMatrix, spec: HolomorphySpec) -> Dict:
        def compute():
            unimodular = is_unimodular(M, spec)
            return {"unimodular": unimodular,
                    "minors": [format_rational_function(u) for u in maximal_minors(M)]}
        return self._timed(f"unimodularity of a {M.k}x{M.m} matrix", compute)

    def unimodular_density(self, spec: HolomorphySpec, k: int, m: int, L: Optional[LPolynomial] = None) -> Dict:
        def compute():
            return {"density": format_rational(unimodular_density_exact(spec, k, m, L))}
        return self._timed(f"unimodular density k={k}, m={m}", compute)

    def zeta(self, s: int, spec: HolomorphySpec, L: Optional[LPolynomial] = None,
             truncate: Optional[int] = None) -> Dict:
        def compute():
            record = {"zeta_H": format_rational(zeta_H(s, spec, L))}
            if truncate is not None:
                try:
                    value = zeta_H_euler_truncated(s, spec, truncate, self.settings.max_exact_bits)
                    record["zeta_H_truncated"] = format_rational(value)
                except CapExceededError:
                    approx = zeta_H_euler_truncated_approx(s, spec, truncate)
                    record["zeta_H_truncated_approx"] = mpmath.nstr(approx, APPROX_DIGITS)
                record["log_tail_bound"] = format_rational(euler_tail_bound(s, spec, truncate))
            return record
        return self._timed(f"zeta_H({s})", compute)

    def local_ramified(self, P: Place, n: int, bruteforce: bool = False) -> Dict:
        def compute():
            record = {"place": format_place(P), "n": n, "measure": format_rational(local_measure_U(P, n).value)}
            if bruteforce:
                oracle = local_measure_U_bruteforce(P, n, self.settings.max_bruteforce).value
                record["bruteforce"] = format_rational(oracle)
                record["agree"] = format_rational(oracle) == record["measure"]
            return record
        return self._timed(f"local ramified measure at {format_place(P)}", compute)

    def local_unimodular(self, P: Place, k: int, m: int, bruteforce: bool = False) -> Dict:
        def compute():
            value = local_nonunimodular_measure(P, k, m)
            record = {"place": format_place(P), "k": k, "m": m, "measure": format_rational(value)}
            if bruteforce:
                oracle = local_nonunimodular_bruteforce(P, k, m, self.settings.max_bruteforce)
                record["bruteforce"] = format_rational(oracle)
                record["agree"] = oracle == value
            return record
        return self._timed(f"local non-unimodular measure at {format_place(P)}", compute)

