import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catqfi.coherent import CoherentSuperposition, inner
from catqfi.fock import density, loss_kraus, purity_fock, to_fock
from catqfi.loss import (CoherentMixture, apply_loss, lossy_family,
                         spectral_decompose, state_to_operator)
from catqfi.metrics import (family_fidelity, family_purity,
                            fidelity_pure_mixed, loss_sensitivity, purity,
                            purity_operator)
from catqfi.states import CatParams, build_cat


def random_superposition(rng, n_amps, radius=2.0):
    amps = radius * rng.random(n_amps) * np.exp(2j * math.pi * rng.random(n_amps))
    coeffs = rng.normal(size=n_amps) + 1j * rng.normal(size=n_amps)
    raw = CoherentSuperposition(coeffs, amps)
    return raw.scaled(1.0 / math.sqrt(inner(raw, raw).real))


def test_purity_pure_state_is_one():
    m = lossy_family("odd", CatParams(alpha=10.0), 1.0)
    assert purity(m) == pytest.approx(1.0, abs=1e-14)


def test_purity_odd_fig_point():
    p = family_purity("odd", CatParams(alpha=10.0), 0.983)
    assert p == pytest.approx(0.50055688757392236, rel=1e-12)


def test_purity_hhg_fig_point():
    p = family_purity("hhg", CatParams(alpha=10.5, delta_alpha=-0.5), 0.983)
    assert p == pytest.approx(0.9705844158385788, rel=1e-12)


def test_purity_operator_rank_one():
    s = build_cat("even", CatParams(alpha=1.5))
    assert purity_operator(state_to_operator(s)) == pytest.approx(1.0, abs=1e-12)


def test_purity_operator_matches_fock():
    rng = np.random.default_rng(11)
    for _ in range(4):
        s = random_superposition(rng, 3)
        op = apply_loss(s, 0.73)
        nmax = 44
        rho = loss_kraus(density(to_fock(s, nmax)), 0.73)
        assert purity_operator(op) == pytest.approx(purity_fock(rho), abs=1e-8)


@pytest.mark.parametrize("family,params", [
    ("even", CatParams(alpha=1.2)),
    ("odd", CatParams(alpha=2.0)),
    ("hhg", CatParams(alpha=1.8, delta_alpha=-0.4)),
])
def test_purity_agrees_with_operator_form(family, params):
    for eta in (0.05, 0.4, 0.83, 1.0):
        op = apply_loss(build_cat(family, params), eta)
        assert purity(spectral_decompose(op)) == \
            pytest.approx(purity_operator(op), abs=1e-10)


@given(alpha=st.floats(0.5, 25.0), eta=st.floats(0.0, 1.0))
@settings(max_examples=200, deadline=None)
def test_parity_purity_bounds(alpha, eta):
    # rank <= 2, so tr rho^2 lives in [1/2, 1]
    p = family_purity("odd", CatParams(alpha=alpha), eta)
    assert 0.5 - 1e-12 <= p <= 1.0 + 1e-12


@given(alpha=st.floats(1.0, 25.0), eta=st.floats(0.0, 1.0))
@settings(max_examples=200, deadline=None)
def test_hhg_purity_above_half(alpha, eta):
    p = family_purity("hhg", CatParams(alpha=alpha, delta_alpha=-0.5), eta)
    assert p > 0.5
    assert p <= 1.0 + 1e-12


def test_fidelity_no_loss_is_one():
    for family, params in (("odd", CatParams(alpha=10.0)),
                           ("hhg", CatParams(alpha=10.5, delta_alpha=-0.5))):
        assert family_fidelity(family, params, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_fidelity_odd_fig_point():
    f = family_fidelity("odd", CatParams(alpha=10.0), 0.965)
    assert f == pytest.approx(0.50045594098277701, rel=1e-12)


def test_fidelity_hhg_fig_point():
    f = family_fidelity("hhg", CatParams(alpha=10.5, delta_alpha=-0.5), 0.965)
    assert f == pytest.approx(0.96905772289393621, rel=1e-12)


def test_fidelity_monotone_in_weight():
    even = build_cat("even", CatParams(alpha=2.0))
    odd = build_cat("odd", CatParams(alpha=2.0))
    vals = [fidelity_pure_mixed(even, CoherentMixture([w, 1.0 - w], [even, odd]))
            for w in (0.2, 0.5, 0.8, 0.95)]
    assert vals == sorted(vals)
    assert vals[0] == pytest.approx(0.2, abs=1e-12)


def test_sensitivity_coherent_is_flat():
    reports = loss_sensitivity("coherent", CatParams(alpha=1.0), [25.0, 100.0])
    for r in reports:
        assert r.d_purity_d_eta == 0.0
        assert r.d_fidelity_d_eta == 0.0


def test_sensitivity_odd_scales_with_photon_number():
    reports = loss_sensitivity("odd", CatParams(alpha=1.0), [25.0, 100.0])
    ratio = reports[1].d_purity_d_eta / reports[0].d_purity_d_eta
    assert ratio == pytest.approx(4.0, rel=0.1)
    assert ratio == pytest.approx(3.9994000699815277, rel=1e-9)
    # slope ~ 2 <n> at eta = 1
    assert reports[1].d_purity_d_eta == pytest.approx(200.0, rel=1e-3)


def test_sensitivity_hhg_is_photon_number_independent():
    reports = loss_sensitivity("hhg", CatParams(alpha=1.0, delta_alpha=-0.5),
                               [25.0, 50.0, 100.0])
    dps = [r.d_purity_d_eta for r in reports]
    dfs = [r.d_fidelity_d_eta for r in reports]
    assert max(dps) - min(dps) < 1e-6
    assert max(dfs) - min(dfs) < 1e-6
    assert dps[0] == pytest.approx(1.76040406252298, rel=1e-6)


def test_sensitivity_step_converged():
    full = loss_sensitivity("odd", CatParams(alpha=1.0), [100.0], step=1e-6)
    half = loss_sensitivity("odd", CatParams(alpha=1.0), [100.0], step=5e-7)
    for field in ("d_purity_d_eta", "d_fidelity_d_eta"):
        a, b = getattr(full[0], field), getattr(half[0], field)
        assert abs(a - b) < 1e-4 * abs(a)
