"""Constructors for the cat states under study and photon-number utilities."""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .coherent import (MERGE_TOL, CoherentSuperposition, overlap,
                       superposition_moment)
from .errors import DegenerateCat, NoBracket

FAMILIES = ("coherent", "even", "odd", "hhg")


@dataclass(frozen=True)
class CatParams:
    """Amplitude parameters of a cat state.

    delta_alpha only matters for the hhg family, parity only for even/odd
    callers that carry the family as data rather than as a string.
    """

    alpha: complex = 0j
    delta_alpha: complex = 0j
    parity: str = "odd"


def even_odd_cat(alpha: complex, parity: str) -> CoherentSuperposition:
    """(|alpha> + s|-alpha>)/sqrt(N) with s = +1 (even) or -1 (odd).

    N = 2(1 + s*Re<alpha|-alpha>) evaluated through the log-domain overlap;
    the odd normalization uses expm1 so small alpha keeps full precision.
    """
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    alpha = complex(alpha)
    ov = overlap(alpha, -alpha)  # real: conj(alpha)*(-alpha) = -|alpha|^2
    if parity == "even":
        norm = 2.0 * (1.0 + ov.materialize().real)
        sign = 1.0
    else:
        norm = -2.0 * math.expm1(ov.log_mag)
        sign = -1.0
        # |2 alpha| below the merge tolerance would collapse the two terms
        # into a zero vector instead of an odd cat
        if norm < 1e-300 or abs(2.0 * alpha) <= MERGE_TOL:
            raise DegenerateCat("odd cat needs alpha != 0; normalization underflowed")
    c = 1.0 / math.sqrt(norm)
    return CoherentSuperposition([c, sign * c], [alpha, -alpha])


def hhg_cat(alpha: complex, delta_alpha: complex) -> CoherentSuperposition:
    """(|alpha+delta_alpha> - xi|alpha>)/sqrt(1-|xi|^2), xi = <alpha|alpha+delta_alpha>.

    Subtracting the xi-weighted component makes the state orthogonal to
    |alpha>; the distinguishability is controlled by delta_alpha alone.
    """
    alpha = complex(alpha)
    delta_alpha = complex(delta_alpha)
    lx = overlap(alpha, alpha + delta_alpha)
    # |xi| = exp(log_mag); degenerate when the components are parallel
    if math.exp(min(lx.log_mag, 0.0)) >= 1.0 - 1e-12:
        raise DegenerateCat("hhg cat needs delta_alpha != 0; |xi| ~ 1")
    norm = -math.expm1(2.0 * lx.log_mag)  # 1 - |xi|^2
    xi = lx.materialize()
    c = 1.0 / math.sqrt(norm)
    return CoherentSuperposition([c, -c * xi], [alpha + delta_alpha, alpha])


def build_cat(family: str, params: CatParams) -> CoherentSuperposition:
    """Construct the pure state of the given family from its parameters."""
    if family == "coherent":
        return CoherentSuperposition([1.0], [params.alpha])
    if family in ("even", "odd"):
        return even_odd_cat(params.alpha, family)
    if family == "hhg":
        return hhg_cat(params.alpha, params.delta_alpha)
    raise ValueError(f"unknown state family {family!r}")


def mean_photon(s: CoherentSuperposition) -> float:
    """<n> of a normalized superposition."""
    return superposition_moment(s, s, 1, 1).real


def match_amplitude_for_photon_number(target_n: float, state_family: str,
                                      delta_alpha: complex = 0j,
                                      tol: float = 1e-9) -> float:
    """Real amplitude a > 0 whose `state_family` state has mean photon `target_n`.

    The bracket starts at sqrt(target_n) +- 2 and grows geometrically; the
    map a -> <n> is monotone for every family, so a sign change pins the
    root.  Raises NoBracket when the target is below the family's floor
    (odd cats have <n> >= 1, the hhg family has a delta_alpha-dependent
    floor).
    """
    if target_n <= 0:
        raise NoBracket(f"target mean photon number must be positive, got {target_n}")

    def objective(a: float) -> float:
        state = build_cat(state_family, CatParams(alpha=a, delta_alpha=delta_alpha))
        return mean_photon(state) - target_n

    lo = max(math.sqrt(target_n) - 2.0, 1e-6)
    hi = math.sqrt(target_n) + 2.0
    flo = objective(lo)
    while flo > 0.0:
        lo *= 0.5
        if lo < 1e-100:
            raise NoBracket(
                f"{state_family} family cannot reach <n> = {target_n} (floor above target)")
        try:
            flo = objective(lo)
        except DegenerateCat:
            # the constructor gave out before the bracket closed: the
            # family's photon-number floor sits above the target
            raise NoBracket(
                f"{state_family} family cannot reach <n> = {target_n} "
                "(floor above target)") from None
    fhi = objective(hi)
    while fhi < 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise NoBracket(f"no amplitude below 1e12 reaches <n> = {target_n}")
        fhi = objective(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    return brentq(objective, lo, hi, xtol=tol)
