"""Scalar quality measures of lossy states: purity, fidelity, loss slopes."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coherent import CoherentSuperposition, gram_matrix, inner
from .loss import CoherentMixture, CoherentOperator, lossy_family
from .states import CatParams, build_cat, match_amplitude_for_photon_number


def purity(m: CoherentMixture) -> float:
    """Tr rho^2 of an orthogonal mixture: sum of squared weights."""
    return float(np.sum(m.weights ** 2))


def purity_operator(op: CoherentOperator) -> float:
    """Tr rho^2 straight from the coefficient matrix: trace(M S M S).

    Decomposition-free cross-check for spectral_decompose.
    """
    s = gram_matrix(op.amplitudes)
    ms = op.matrix @ s
    return float(np.trace(ms @ ms).real)


def fidelity_pure_mixed(psi: CoherentSuperposition, m: CoherentMixture) -> float:
    """<psi|rho|psi> = sum_i w_i |<psi|v_i>|^2."""
    acc = 0.0
    for w, state in m.components:
        acc += w * abs(inner(psi, state)) ** 2
    return float(acc)


def _scaled_params(params: CatParams, eta: float) -> CatParams:
    rt = math.sqrt(eta)
    return CatParams(alpha=params.alpha * rt, delta_alpha=params.delta_alpha * rt,
                     parity=params.parity)


def family_purity(family: str, params: CatParams, eta: float) -> float:
    return purity(lossy_family(family, params, eta))


def family_fidelity(family: str, params: CatParams, eta: float) -> float:
    """Fidelity of the lossy state against the sqrt(eta)-reduced pure reference.

    The reference amplitude is scaled by sqrt(eta) (it maximizes the
    fidelity over coherent-amplitude choices), so eta = 1 gives exactly 1.
    """
    mixture = lossy_family(family, params, eta)
    reference = build_cat(family, _scaled_params(params, eta))
    return fidelity_pure_mixed(reference, mixture)


@dataclass(frozen=True)
class SensitivityReport:
    """One-sided loss derivatives at the no-loss point."""

    target_n: float
    alpha: float
    d_purity_d_eta: float
    d_fidelity_d_eta: float
    step: float


def loss_sensitivity(state_family: str, params: CatParams, n_grid,
                     step: float = 1e-6) -> list[SensitivityReport]:
    """Loss derivatives of purity and fidelity at eta = 1, per target <n>.

    For each target mean photon number the family amplitude is re-matched,
    then d f / d eta is estimated by the one-sided difference
    (f(1) - f(1 - step)) / step; eta > 1 is out of domain so no centered
    stencil exists.
    """
    reports = []
    for target in n_grid:
        target = float(target)
        if state_family == "coherent":
            alpha = math.sqrt(target)
        else:
            alpha = match_amplitude_for_photon_number(
                target, state_family, delta_alpha=params.delta_alpha)
        p = CatParams(alpha=alpha, delta_alpha=params.delta_alpha, parity=params.parity)
        d_pur = (family_purity(state_family, p, 1.0)
                 - family_purity(state_family, p, 1.0 - step)) / step
        d_fid = (family_fidelity(state_family, p, 1.0)
                 - family_fidelity(state_family, p, 1.0 - step)) / step
        reports.append(SensitivityReport(
            target_n=target, alpha=alpha, d_purity_d_eta=d_pur,
            d_fidelity_d_eta=d_fid, step=step))
    return reports
