"""Log-domain algebra for finite superpositions of coherent states.

Overlaps between distant coherent states decay like exp(-|a-b|^2/2), far
below double-precision underflow at the amplitude scales this package
targets (|a| up to ~100).  Primitive overlaps are therefore carried as a
log-magnitude plus a phase and materialized to ordinary complex numbers
only at use sites.  Every downstream formula stays finite when a
materialized overlap is exactly zero.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

# exp underflows to zero a little below -708; past this point the overlap is
# an exact zero for every consumer in the package.
UNDERFLOW_LOG = -700.0

# amplitudes closer than this are treated as the same basis state
MERGE_TOL = 1e-12


@dataclass(frozen=True)
class LogComplex:
    """A complex number z = exp(log_mag) * exp(1j*phase).

    log_mag = -inf encodes exactly zero.
    """

    log_mag: float
    phase: float

    def materialize(self) -> complex:
        """Convert to an ordinary complex number, underflowing to exact 0."""
        if self.log_mag < UNDERFLOW_LOG:
            return 0j
        return cmath.rect(math.exp(self.log_mag), self.phase)

    def conj(self) -> "LogComplex":
        return LogComplex(self.log_mag, -self.phase)

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(self.log_mag + other.log_mag, self.phase + other.phase)


def overlap(a: complex, b: complex) -> LogComplex:
    """<a|b> for coherent amplitudes a and b, kept in the log domain.

    log_mag = -|a|^2/2 - |b|^2/2 + Re(a* b), phase = Im(a* b).
    """
    a = complex(a)
    b = complex(b)
    ab = a.conjugate() * b
    log_mag = -0.5 * (a.real * a.real + a.imag * a.imag) \
              - 0.5 * (b.real * b.real + b.imag * b.imag) + ab.real
    return LogComplex(log_mag, ab.imag)


class CoherentSuperposition:
    """A finite superposition sum_i c_i |a_i> of coherent states.

    Construction merges amplitudes that coincide within 1e-12 (absolute
    complex distance), summing their coefficients; basis order is
    first-seen.  States are not normalized automatically.
    """

    __slots__ = ("coefficients", "amplitudes")

    def __init__(self, coefficients, amplitudes):
        coeffs = [complex(c) for c in coefficients]
        amps = [complex(a) for a in amplitudes]
        if len(coeffs) != len(amps):
            raise ValueError("coefficient/amplitude length mismatch")
        merged_c: list[complex] = []
        merged_a: list[complex] = []
        for c, a in zip(coeffs, amps):
            for k, b in enumerate(merged_a):
                if abs(a - b) <= MERGE_TOL:
                    merged_c[k] += c
                    break
            else:
                merged_c.append(c)
                merged_a.append(a)
        self.coefficients = np.asarray(merged_c, dtype=complex)
        self.amplitudes = np.asarray(merged_a, dtype=complex)

    def __len__(self) -> int:
        return len(self.amplitudes)

    def __repr__(self) -> str:
        terms = ", ".join(
            f"({c:.6g})|{a:.6g}>" for c, a in zip(self.coefficients, self.amplitudes)
        )
        return f"CoherentSuperposition[{terms}]"

    def scaled(self, factor: complex) -> "CoherentSuperposition":
        return CoherentSuperposition(self.coefficients * factor, self.amplitudes)

    def norm(self) -> float:
        return math.sqrt(max(inner(self, self).real, 0.0))


def inner(x: CoherentSuperposition, y: CoherentSuperposition) -> complex:
    """<x|y>, sesquilinear in the coefficients (conjugate on x)."""
    acc = 0j
    for ci, ai in zip(x.coefficients, x.amplitudes):
        for dj, bj in zip(y.coefficients, y.amplitudes):
            acc += ci.conjugate() * dj * overlap(ai, bj).materialize()
    return acc


def mode_moment(gamma: complex, delta: complex, m: int, n: int) -> complex:
    """<gamma| (a^dag)^m a^n |delta> between single coherent states.

    Equals conj(gamma)^m * delta^n * <gamma|delta>.  Callers here never need
    m, n beyond 2; the formula itself is exact for any non-negative orders.
    """
    gamma = complex(gamma)
    delta = complex(delta)
    return gamma.conjugate() ** m * delta ** n * overlap(gamma, delta).materialize()


def superposition_moment(x: CoherentSuperposition, y: CoherentSuperposition,
                         m: int, n: int) -> complex:
    """Sesquilinear extension of mode_moment to superpositions."""
    acc = 0j
    for ci, ai in zip(x.coefficients, x.amplitudes):
        for dj, bj in zip(y.coefficients, y.amplitudes):
            acc += ci.conjugate() * dj * mode_moment(ai, bj, m, n)
    return acc


def gram_matrix(amplitudes) -> np.ndarray:
    """Hermitian matrix of pairwise overlaps <a_i|a_j>."""
    amps = [complex(a) for a in amplitudes]
    n = len(amps)
    g = np.empty((n, n), dtype=complex)
    for i in range(n):
        g[i, i] = 1.0
        for j in range(i + 1, n):
            v = overlap(amps[i], amps[j]).materialize()
            g[i, j] = v
            g[j, i] = v.conjugate()
    return g
