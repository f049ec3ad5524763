"""Pure-loss channel on coherent superpositions and low-rank spectral forms.

The channel acts in closed form: amplitudes shrink by sqrt(eta) and the
coefficient matrix picks up Gaussian decoherence factors from the traced-out
environment.  Spectral decompositions stay in the coherent basis via Gram
orthonormalization, so nothing here ever touches a Fock cutoff.
"""
from __future__ import annotations

import math

import numpy as np

from .coherent import (
    MERGE_TOL,
    UNDERFLOW_LOG,
    CoherentSuperposition,
    gram_matrix,
    inner,
    overlap,
)
from .errors import DegenerateCat, DomainError, IllConditionedGram
from .states import CatParams, build_cat, even_odd_cat

# eigenvalues below this are dropped from mixtures: below double-precision
# resolution of the trace normalization
RANK_EPS = 1e-13


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0 or math.isnan(eta):
        raise DomainError(f"transmission eta must lie in [0, 1], got {eta}")
    return eta


class CoherentOperator:
    """Hermitian operator sum_ij M_ij |a_i><a_j| over a merged coherent basis."""

    __slots__ = ("amplitudes", "matrix")

    def __init__(self, amplitudes, matrix):
        amps = [complex(a) for a in amplitudes]
        mat = np.asarray(matrix, dtype=complex)
        if mat.shape != (len(amps), len(amps)):
            raise ValueError("matrix shape does not match amplitude count")
        # merge duplicate basis amplitudes, summing rows and columns
        groups: list[int] = []
        merged: list[complex] = []
        for a in amps:
            for k, b in enumerate(merged):
                if abs(a - b) <= MERGE_TOL:
                    groups.append(k)
                    break
            else:
                groups.append(len(merged))
                merged.append(a)
        if len(merged) != len(amps):
            z = np.zeros((len(amps), len(merged)))
            for i, g in enumerate(groups):
                z[i, g] = 1.0
            mat = z.T @ mat @ z
        defect = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
        if defect > 1e-12 * max(1.0, float(np.max(np.abs(mat)))):
            raise ValueError(f"coefficient matrix not Hermitian (defect {defect:.2e})")
        self.amplitudes = np.asarray(merged, dtype=complex)
        self.matrix = 0.5 * (mat + mat.conj().T)

    def trace(self) -> complex:
        s = gram_matrix(self.amplitudes)
        return complex(np.trace(self.matrix @ s))

    def __repr__(self) -> str:
        return f"CoherentOperator(rank<={len(self.amplitudes)}, amps={self.amplitudes})"


class CoherentMixture:
    """Statistical mixture of mutually orthogonal normalized superpositions."""

    __slots__ = ("weights", "states")

    def __init__(self, weights, states):
        w = np.asarray([float(x) for x in weights])
        if len(w) != len(states):
            raise ValueError("weight/state length mismatch")
        if len(w) == 0:
            raise ValueError("mixture needs at least one component")
        if np.any(w < -1e-12):
            raise ValueError(f"negative mixture weight: {w.min()}")
        if abs(w.sum() - 1.0) > 1e-10:
            raise ValueError(f"mixture weights sum to {w.sum()!r}, not 1")
        for i, si in enumerate(states):
            for j in range(i, len(states)):
                g = inner(si, states[j])
                expected = 1.0 if i == j else 0.0
                if abs(g - expected) > 1e-8:
                    raise ValueError(
                        f"components {i},{j} not orthonormal: <i|j> = {g:.3e}")
        self.weights = w
        self.states = list(states)

    @property
    def components(self):
        return list(zip(self.weights, self.states))

    def __len__(self) -> int:
        return len(self.weights)


def state_to_operator(s: CoherentSuperposition) -> CoherentOperator:
    """|s><s| as a CoherentOperator."""
    c = s.coefficients
    return CoherentOperator(s.amplitudes, np.outer(c, c.conjugate()))


def apply_loss(s, eta: float) -> CoherentOperator:
    """Pure-loss channel with transmission eta.

    Accepts a CoherentSuperposition (taken as a pure density operator) or a
    CoherentOperator.  Basis amplitudes scale by sqrt(eta); entry (i, j)
    picks up the environment overlap <a_j*sqrt(1-eta)|a_i*sqrt(1-eta)>.
    Composable: eta1 then eta2 equals eta1*eta2.
    """
    eta = _check_eta(eta)
    if isinstance(s, CoherentSuperposition):
        op = state_to_operator(s)
    else:
        op = s
    amps = op.amplitudes
    rt = math.sqrt(eta)
    rr = math.sqrt(1.0 - eta)
    n = len(amps)
    decay = np.empty((n, n), dtype=complex)
    for i in range(n):
        decay[i, i] = 1.0
        for j in range(i + 1, n):
            v = overlap(amps[j] * rr, amps[i] * rr).materialize()
            decay[i, j] = v
            decay[j, i] = v.conjugate()
    return CoherentOperator(amps * rt, op.matrix * decay)


def _fix_phase(vec: np.ndarray, amps: np.ndarray) -> np.ndarray:
    """Rotate so the coefficient of the largest-magnitude amplitude is real > 0."""
    i = int(np.argmax(np.abs(amps)))
    if abs(vec[i]) < 1e-300:
        i = int(np.argmax(np.abs(vec)))
    ph = vec[i] / abs(vec[i])
    return vec * ph.conjugate()


def spectral_decompose(op: CoherentOperator) -> CoherentMixture:
    """Eigen-pairs of a coherent-basis density operator.

    Diagonalizes S^(1/2) M S^(1/2) (Hermitian by construction), maps
    eigenvectors back with S^(-1/2) so they come out normalized in the
    coherent metric, and drops eigenvalues below the rank threshold.
    """
    amps = op.amplitudes
    m = op.matrix
    n = len(amps)
    # fully distinguishable basis with no coherences left: the Gram matrix
    # is exactly the identity once every pairwise overlap underflows, and a
    # diagonal M is then already the spectral form (eigh would scramble the
    # exactly degenerate weights into arbitrary rotations of the basis)
    if n > 1 and not np.any(m - np.diag(m.diagonal())) and all(
        overlap(amps[i], amps[j]).log_mag < UNDERFLOW_LOG
        for i in range(n) for j in range(i + 1, n)
    ):
        order = np.argsort(-m.diagonal().real, kind="stable")
        weights, states = [], []
        for k in order:
            w = m[k, k].real
            if w < RANK_EPS:
                continue
            weights.append(w)
            states.append(CoherentSuperposition([1.0], [amps[k]]))
        return CoherentMixture(weights, states)

    s = gram_matrix(amps)
    evals, u = np.linalg.eigh(s)
    if evals[0] < 1e-14 * evals[-1]:
        raise IllConditionedGram(
            f"Gram eigenvalue ratio {evals[0]:.3e}/{evals[-1]:.3e} below 1e-14")
    root = np.sqrt(evals)
    s_half = (u * root) @ u.conj().T
    s_half_inv = (u / root) @ u.conj().T
    t = s_half @ m @ s_half
    t = 0.5 * (t + t.conj().T)
    w, v = np.linalg.eigh(t)
    weights, states = [], []
    for k in range(n - 1, -1, -1):  # descending
        if w[k] < RANK_EPS:
            continue
        vec = _fix_phase(s_half_inv @ v[:, k], amps)
        weights.append(float(w[k]))
        states.append(CoherentSuperposition(vec, amps))
    return CoherentMixture(weights, states)


def _cat_norm(a_sq: float, parity: str) -> float:
    """Normalization 2(1 +- e^(-2|alpha|^2)) from |alpha|^2."""
    if parity == "even":
        return 2.0 * (1.0 + math.exp(-2.0 * a_sq))
    return -2.0 * math.expm1(-2.0 * a_sq)


def zeta(alpha: complex, parity: str, eta: float) -> float:
    """Parity-flip weight of the lossy even/odd cat.

    zeta = (N_flip(alpha*sqrt(eta)) / (2 N_parity(alpha))) * (1 - e^(-2|alpha|^2(1-eta))).
    Lies in [0, 1/2] for eta in (0, 1]; tends to 1/2 as alpha grows at fixed
    eta < 1; equals 1 at eta = 0 for the odd family (everything decays to
    the vacuum, which is even).
    """
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    eta = _check_eta(eta)
    a_sq = abs(complex(alpha)) ** 2
    n_same = _cat_norm(a_sq, parity)
    if n_same < 1e-300:
        raise DegenerateCat("odd cat needs alpha != 0")
    flip = "odd" if parity == "even" else "even"
    n_flip_eta = _cat_norm(a_sq * eta, flip)
    leak = -math.expm1(-2.0 * a_sq * (1.0 - eta))
    return (n_flip_eta / (2.0 * n_same)) * leak


def lossy_even_odd(alpha: complex, parity: str, eta: float) -> CoherentMixture:
    """Closed-form spectral decomposition of the lossy even/odd cat.

    Two components: the same-parity cat at alpha*sqrt(eta) with weight
    1 - zeta and the flipped-parity cat with weight zeta.  Zero-weight
    components are dropped before construction, so the eta = 0 endpoint
    reduces cleanly to the vacuum.
    """
    eta = _check_eta(eta)
    z = zeta(alpha, parity, eta)
    flip = "odd" if parity == "even" else "even"
    a_eta = complex(alpha) * math.sqrt(eta)
    pairs = [(1.0 - z, parity), (z, flip)]
    pairs.sort(key=lambda t: -t[0])
    weights, states = [], []
    for w, par in pairs:
        if w < RANK_EPS:
            continue
        weights.append(w)
        states.append(even_odd_cat(a_eta, par))
    return CoherentMixture(weights, states)


def lossy_hhg(alpha: complex, delta_alpha: complex, eta: float) -> CoherentMixture:
    """Closed-form spectral decomposition of the lossy HHG cat.

    Weights: lambda_pm = (1 +- sqrt(1 - 4 D)) / 2 with
    D = N_eta |xi|^2 (1 - |mu_eta|^2) / N^2, where xi^eta is the overlap of
    the sqrt(eta)-scaled components, mu^eta the environment-side overlap and
    N, N_eta the corresponding 1 - |xi|^2 normalizations.  The identity
    xi_eta * conj(mu_eta) = xi (exact for any complex amplitudes) collapses
    the general radicand to this form, which is manifestly independent of
    alpha.  Eigenvectors are the first-row null-space solutions written as
    products of exactly-known factors (no subtractive cancellation), then
    normalized in the coherent metric.
    """
    eta = _check_eta(eta)
    alpha = complex(alpha)
    delta_alpha = complex(delta_alpha)
    b = alpha + delta_alpha
    l_xi = overlap(alpha, b)
    if math.exp(min(l_xi.log_mag, 0.0)) >= 1.0 - 1e-12:
        raise DegenerateCat("hhg cat needs delta_alpha != 0; |xi| ~ 1")
    # within a rounding error of the identity channel the split below loses
    # precision; the exact answer there is the pure state itself
    if eta >= 1.0 - 1e-12:
        return CoherentMixture([1.0], [build_cat("hhg", CatParams(alpha, delta_alpha))])

    rt = math.sqrt(eta)
    rr = math.sqrt(1.0 - eta)
    l_xi_eta = overlap(alpha * rt, b * rt)
    l_mu_eta = overlap(b * rr, alpha * rr)

    n_full = -math.expm1(2.0 * l_xi.log_mag)       # 1 - |xi|^2
    n_eta = -math.expm1(2.0 * l_xi_eta.log_mag)    # 1 - |xi_eta|^2
    one_minus_mu_sq = -math.expm1(2.0 * l_mu_eta.log_mag)
    xi_sq = math.exp(2.0 * l_xi.log_mag)

    d_val = n_eta * xi_sq * one_minus_mu_sq / (n_full * n_full)
    root = math.sqrt(max(1.0 - 4.0 * d_val, 0.0))
    lam_minor = 2.0 * d_val / (1.0 + root)  # (1 - root)/2 without cancellation
    lambdas = (0.5 * (1.0 + root), lam_minor)

    xi_eta = l_xi_eta.materialize()
    # the identity xi = xi_eta * conj(mu_eta) collapses the null-space row
    # xi_eta* - xi* mu_eta* to a pure product, so both eigenvector components
    # below stay fully accurate as eta -> 1 where everything is O(1 - eta)
    x_num = xi_eta.conjugate() * one_minus_mu_sq
    amps = [b * rt, alpha * rt]
    seconds = (-n_full * lam_minor, n_full * (lam_minor - 1.0))

    weights, states = [], []
    for lam, second in zip(lambdas, seconds):
        if lam < RANK_EPS:
            continue
        raw = CoherentSuperposition(np.array([x_num, second]), amps)
        nrm = math.sqrt(inner(raw, raw).real)
        vec = _fix_phase(raw.coefficients / nrm, raw.amplitudes)
        weights.append(lam)
        states.append(CoherentSuperposition(vec, raw.amplitudes))
    return CoherentMixture(weights, states)


def lossy_family(family: str, params: CatParams, eta: float) -> CoherentMixture:
    """Dispatch the closed-form lossy decomposition for a state family."""
    eta = _check_eta(eta)
    if family == "coherent":
        amp = complex(params.alpha) * math.sqrt(eta)
        return CoherentMixture([1.0], [CoherentSuperposition([1.0], [amp])])
    if family in ("even", "odd"):
        return lossy_even_odd(params.alpha, family, eta)
    if family == "hhg":
        return lossy_hhg(params.alpha, params.delta_alpha, eta)
    raise ValueError(f"unknown state family {family!r}")
