"""Quantum Fisher information for beam-splitter phase sensing.

The generator is H = -i(a0^dag a1 - a0 a1^dag), the signal mode carrying a
(possibly lossy) cat state and the second mode a coherent local oscillator.
Everything reduces to closed-form matrix elements between two-mode coherent
products, so the mixed-state formula runs at any photon number.
"""
from __future__ import annotations

import cmath
import math
from functools import lru_cache

import numpy as np

from .coherent import MERGE_TOL, overlap
from .errors import EmptySupport
from .loss import CoherentMixture, lossy_family
from .states import CatParams, build_cat

# pairs with weight sum below this are excluded from the mixed-state sum
PAIR_EPS = 1e-14


class TwoModeSuperposition:
    """sum_k c_k |a_k>|b_k| over two-mode coherent products, normalized."""

    __slots__ = ("coefficients", "amplitudes0", "amplitudes1")

    def __init__(self, coefficients, amplitudes0, amplitudes1, check_norm=True):
        coeffs = [complex(c) for c in coefficients]
        a0 = [complex(a) for a in amplitudes0]
        a1 = [complex(a) for a in amplitudes1]
        if not len(coeffs) == len(a0) == len(a1):
            raise ValueError("coefficient/amplitude length mismatch")
        merged: list[list[complex]] = []
        for c, x, y in zip(coeffs, a0, a1):
            for row in merged:
                if abs(x - row[1]) <= MERGE_TOL and abs(y - row[2]) <= MERGE_TOL:
                    row[0] += c
                    break
            else:
                merged.append([c, x, y])
        self.coefficients = np.asarray([r[0] for r in merged], dtype=complex)
        self.amplitudes0 = np.asarray([r[1] for r in merged], dtype=complex)
        self.amplitudes1 = np.asarray([r[2] for r in merged], dtype=complex)
        if check_norm:
            nrm = two_mode_inner(self, self).real
            if abs(nrm - 1.0) > 1e-10:
                raise ValueError(f"two-mode state not normalized: <s|s> = {nrm!r}")

    def terms(self):
        return zip(self.coefficients, self.amplitudes0, self.amplitudes1)

    def __len__(self) -> int:
        return len(self.coefficients)


def two_mode_inner(x: TwoModeSuperposition, y: TwoModeSuperposition) -> complex:
    acc = 0j
    for cx, x0, x1 in x.terms():
        for cy, y0, y1 in y.terms():
            acc += cx.conjugate() * cy * (overlap(x0, y0) * overlap(x1, y1)).materialize()
    return acc


class QfiInput:
    """Spectral form of the two-mode input state: weights plus components."""

    __slots__ = ("weights", "components", "support_threshold")

    def __init__(self, weights, components, support_threshold=1e-12):
        w = np.asarray([float(x) for x in weights])
        if len(w) != len(components):
            raise ValueError("weight/component length mismatch")
        if abs(w.sum() - 1.0) > 1e-10:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        for i, ci in enumerate(components):
            for j in range(i + 1, len(components)):
                g = two_mode_inner(ci, components[j])
                if abs(g) > 1e-8:
                    raise ValueError(f"components {i},{j} not orthogonal: {g:.3e}")
        self.weights = w
        self.components = list(components)
        self.support_threshold = float(support_threshold)


def tensor_lo(s, beta: complex) -> TwoModeSuperposition:
    """|s> (x) |beta> as a two-mode superposition."""
    n = len(s.coefficients)
    return TwoModeSuperposition(s.coefficients, s.amplitudes, [beta] * n)


def attach_lo(m: CoherentMixture, beta: complex) -> QfiInput:
    """Tensor a coherent local oscillator onto every mixture component."""
    return QfiInput(m.weights, [tensor_lo(s, beta) for s in m.states])


def h_element(g0: complex, g1: complex, d0: complex, d1: complex) -> complex:
    """<g0,g1| -i(a0+ a1 - a0 a1+) |d0,d1> between coherent products."""
    ov = (overlap(g0, d0) * overlap(g1, d1)).materialize()
    if ov == 0:
        return 0j
    return -1j * (complex(g0).conjugate() * d1 - d0 * complex(g1).conjugate()) * ov


def h2_element(g0: complex, g1: complex, d0: complex, d1: complex) -> complex:
    """<g0,g1| H^2 |d0,d1>, normal-ordered per mode with commutator terms."""
    ov = (overlap(g0, d0) * overlap(g1, d1)).materialize()
    if ov == 0:
        return 0j
    g0c = complex(g0).conjugate()
    g1c = complex(g1).conjugate()
    d0 = complex(d0)
    d1 = complex(d1)
    poly = (g0c * g0c * d1 * d1
            - g0c * d0 * (g1c * d1 + 1.0)
            - (g0c * d0 + 1.0) * g1c * d1
            + d0 * d0 * g1c * g1c)
    return -poly * ov


def _sup_h(x: TwoModeSuperposition, y: TwoModeSuperposition) -> complex:
    acc = 0j
    for cx, x0, x1 in x.terms():
        for cy, y0, y1 in y.terms():
            acc += cx.conjugate() * cy * h_element(x0, x1, y0, y1)
    return acc


def _sup_h2(x: TwoModeSuperposition, y: TwoModeSuperposition) -> complex:
    acc = 0j
    for cx, x0, x1 in x.terms():
        for cy, y0, y1 in y.terms():
            acc += cx.conjugate() * cy * h2_element(x0, x1, y0, y1)
    return acc


def qfi_mixed(q: QfiInput) -> float:
    """Mixed-state QFI over the retained spectral components.

    F = sum_i 4 w_i <i|H^2|i> - sum_ij 8 w_i w_j / (w_i + w_j) |<i|H|j>|^2,
    with both sums over components above the support threshold and pairs
    whose weight sum would underflow skipped.
    """
    kept = [(w, c) for w, c in zip(q.weights, q.components)
            if w > q.support_threshold]
    if not kept:
        raise EmptySupport(
            f"no component above support threshold {q.support_threshold}")
    first = 0.0
    for w, comp in kept:
        first += 4.0 * w * _sup_h2(comp, comp).real
    second = 0.0
    for i, (wi, ci) in enumerate(kept):
        for j, (wj, cj) in enumerate(kept):
            if j < i or wi + wj < PAIR_EPS:
                continue
            term = (8.0 * wi * wj / (wi + wj)) * abs(_sup_h(ci, cj)) ** 2
            second += term if i == j else 2.0 * term  # |H_ij| = |H_ji|
    return first - second


def qfi_pure(psi: TwoModeSuperposition) -> float:
    """Pure-state QFI: 4 times the generator variance."""
    h_mean = _sup_h(psi, psi)
    h_sq = _sup_h2(psi, psi).real
    return 4.0 * (h_sq - abs(h_mean) ** 2)


@lru_cache(maxsize=4096)
def _pure_qfi_cached(family, alpha, delta_alpha, lo):
    psi = tensor_lo(build_cat(family, CatParams(alpha=alpha, delta_alpha=delta_alpha)), lo)
    return qfi_pure(psi)


def pure_qfi(state_family: str, params: CatParams, lo: complex) -> float:
    """Lossless QFI of the family state interfered with the LO amplitude `lo`."""
    return _pure_qfi_cached(state_family, complex(params.alpha),
                            complex(params.delta_alpha), complex(lo))


def qfi_ratio(state_family: str, params: CatParams, eta: float, chi: float,
              lo_mag: float, lo_loss: bool = True) -> float:
    """F(eta) / F(1) with the LO at lo_mag * e^(i chi).

    The noisy evaluation reduces the LO amplitude by sqrt(eta) (the LO
    passes the same loss), unless lo_loss is disabled; the pure denominator
    always uses the unreduced LO.
    """
    lo = lo_mag * cmath.exp(1j * chi)
    mixture = lossy_family(state_family, params, eta)
    noisy_lo = lo * math.sqrt(eta) if lo_loss else lo
    noisy = qfi_mixed(attach_lo(mixture, noisy_lo))
    pure = _pure_qfi_cached(state_family, complex(params.alpha),
                            complex(params.delta_alpha), lo)
    return noisy / pure


def chi_derivative(state_family: str, params: CatParams, eta: float, chi: float,
                   lo_mag: float, step: float = 1e-4, lo_loss: bool = True) -> float:
    """Central-difference d/dchi of qfi_ratio (default step 1e-4 rad)."""
    hi = qfi_ratio(state_family, params, eta, chi + step, lo_mag, lo_loss)
    lo = qfi_ratio(state_family, params, eta, chi - step, lo_mag, lo_loss)
    return (hi - lo) / (2.0 * step)


def delta_qfi(eta: float, chi: float, hhg_params: CatParams, odd_params: CatParams,
              lo_mag: float, lo_loss: bool = True) -> float:
    """HHG-vs-odd robustness gap: difference of the two noisy-to-pure ratios."""
    return (qfi_ratio("hhg", hhg_params, eta, chi, lo_mag, lo_loss)
            - qfi_ratio("odd", odd_params, eta, chi, lo_mag, lo_loss))
