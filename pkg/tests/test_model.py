import math

import numpy as np
import pytest

from fwadopt import model
from fwadopt.errors import DomainError, InvalidParameterError
from fwadopt.model import AdoptionState, CostModel, FirewallProfile, ModelParams, ThreatEnvironment

from instances import r1


def markov_costs(eta, mu, r, c1i, c2i):
    """Stationary-start discounted cost of the two-state chain, by linear solve.

    An ISP found intruded at the decision epoch is charged C1I for that intrusion too.
    """
    # r v = cost rate + generator applied to v, with C1I charged on every clean -> intruded jump
    m = np.array([[r + eta, -eta], [-mu, r + mu]])
    rhs = np.array([eta * c1i, c2i])
    v_clean, v_intruded = np.linalg.solve(m, rhs)
    p = eta / (eta + mu)
    return p * (v_intruded + c1i) + (1 - p) * v_clean


def test_nonadopter_matches_markov_solve(params):
    for x in (0.0, 0.3, 0.8, 1.0):
        eta = model.mix_rate(x, params.profile.Pi1, params.profile.Pi0, params.threat)
        want = -markov_costs(eta, 1.0, 0.5, 1.0, 1.0)
        assert model.utility_nonadopter(x, params) == pytest.approx(want, rel=1e-12)


def test_adopter_matches_markov_solve(params):
    for x in (0.0, 0.5, 1.0):
        eta = model.mix_rate(x, params.profile.pi1, params.profile.pi0, params.threat)
        want = -0.1 - 0.4 / 0.5 - markov_costs(eta, 1.0, 0.5, 1.0, 1.0)
        assert model.utility_adopter(x, params) == pytest.approx(want, rel=1e-12)


def test_reference_values(params):
    assert model.coefficient_a(params.costs, params.threat) == pytest.approx(5.0)
    assert model.utility_nonadopter(0.0, params) == pytest.approx(-5 / 3, rel=1e-12)
    assert model.utility_nonadopter(1.0, params) == pytest.approx(-0.8333333333, rel=1e-9)
    assert model.utility_adopter(0.0, params) == pytest.approx(-1.5521739130, rel=1e-9)
    assert model.utility_adopter(1.0, params) == pytest.approx(-1.1830188679, rel=1e-9)
    assert model.adoption_gap(0.0, params) == pytest.approx(0.1144927536, rel=1e-9)
    assert model.adoption_gap(1.0, params) == pytest.approx(-0.3496855346, rel=1e-9)
    assert model.gap_slope(0.0, params) == pytest.approx(-0.3264020164, rel=1e-8)
    assert model.stationary_intrusion_probability(0.0, params) == pytest.approx(1 / 3)
    a, b = model.conditional_costs(0.0, params)
    assert (a, b) == (pytest.approx(2.5), pytest.approx(1.25))


def test_owner_enabled_offsets_purchase_fee(params):
    x = np.linspace(0, 1, 11)
    np.testing.assert_allclose(model.utility_owner_enabled(x, params) - model.utility_adopter(x, params), 0.1)


def test_slopes_match_finite_difference(params):
    h = 1e-6
    for x in (0.1, 0.5, 0.9):
        d_n, d_e = model.utility_slopes(x, params)
        fd_n = (model.utility_nonadopter(x + h, params) - model.utility_nonadopter(x - h, params)) / (2 * h)
        fd_e = (model.utility_adopter(x + h, params) - model.utility_adopter(x - h, params)) / (2 * h)
        assert d_n == pytest.approx(fd_n, rel=1e-6)
        assert d_e == pytest.approx(fd_e, rel=1e-6)


def test_limit_utilities_are_scaled_limits(params):
    small = params.replace(r=1e-7)
    g_n, g_e = model.limit_scaled_utilities(0.4, params)
    assert 1e-7 * model.utility_nonadopter(0.4, small) == pytest.approx(g_n, rel=1e-5)
    assert 1e-7 * model.utility_adopter(0.4, small) == pytest.approx(g_e, rel=1e-5)


def test_vectorised_shape(params):
    x = np.linspace(0, 1, 7)
    assert model.utility_nonadopter(x, params).shape == (7,)


def test_fraction_out_of_range(params):
    with pytest.raises(DomainError):
        model.utility_nonadopter(1.5, params)
    with pytest.raises(DomainError):
        model.adoption_gap(np.array([0.2, -0.1]), params)


def test_coupled_pi1():
    assert model.coupled_pi1(0.3, 0.4, 0.0) == pytest.approx(0.12)
    assert model.coupled_pi1(0.3, 0.4, 1.0) == pytest.approx(0.3)
    assert model.coupled_pi1(0.3, 0.4, 0.5) == pytest.approx(0.21)
    with pytest.raises(DomainError):
        model.coupled_pi1(0.3, 1.2, 0.0)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(pi0=0.3, pi1=0.12, Pi0=1.0, Pi1=0.2),  # Pi1 < pi0
        dict(pi0=0.3, pi1=0.4, Pi0=1.0, Pi1=0.5),  # pi1 > pi0
        dict(pi0=0.3, pi1=0.05, Pi0=1.0, Pi1=0.4),  # cooperating firewalls
        dict(pi0=0.3, pi1=0.12, Pi0=1.2, Pi1=0.4),
        dict(pi0=0.3, pi1=0.2, Pi0=1.0, Pi1=0.4, alpha=0.0),  # coupling mismatch
    ],
)
def test_profile_rejects(kwargs):
    with pytest.raises(InvalidParameterError):
        FirewallProfile(**kwargs)


def test_profile_with_pi1_rederives():
    prof = FirewallProfile.coupled(0.3, 0.4, 0.5)
    assert prof.with_Pi1(0.8).pi1 == pytest.approx(model.coupled_pi1(0.3, 0.8, 0.5))
    plain = FirewallProfile(pi0=0.3, pi1=0.2, Pi0=1.0, Pi1=0.4)
    assert plain.with_Pi1(0.6).pi1 == 0.2


def test_costs_and_threat_validation():
    with pytest.raises(InvalidParameterError):
        CostModel(c0=-0.1, c=0.4, c1i=1, c2i=1, r=0.5)
    with pytest.raises(InvalidParameterError):
        CostModel(c0=0.1, c=math.inf, c1i=1, c2i=1, r=0.5)
    with pytest.raises(InvalidParameterError):
        ThreatEnvironment(lam=0.0, mu=1.0)
    zero_r = CostModel(c0=0.1, c=0.4, c1i=1, c2i=1, r=0.0)
    with pytest.raises(InvalidParameterError):
        model.coefficient_a(zero_r, ThreatEnvironment(lam=0.5, mu=1.0))


def test_from_flat_requires_one_of_pi1_alpha():
    base = dict(mu=1, lam=0.5, r=0.5, c0=0.1, c=0.4, c1i=1, c2i=1, pi0=0.3, Pi1=0.4)
    with pytest.raises(InvalidParameterError):
        ModelParams.from_flat(**base)
    with pytest.raises(InvalidParameterError):
        ModelParams.from_flat(**base, pi1=0.12, alpha=0.0)
    assert ModelParams.from_flat(**base, pi1=0.12).profile.alpha is None


def test_replace_follows_coupling(params):
    moved = params.replace(Pi1=0.45)
    assert moved.profile.pi1 == pytest.approx(0.135)
    assert params.replace(**{"lambda": 2.0}).threat.lam == 2.0
    explicit = params.replace(pi1=0.2)
    assert explicit.profile.alpha is None
    with pytest.raises(InvalidParameterError):
        params.replace(bogus=1.0)


def test_as_flat_round_trip(params):
    flat = params.as_flat()
    flat["lam"] = flat.pop("lambda")
    assert ModelParams.from_flat(**flat) == params


def test_adoption_state():
    s = AdoptionState(0.2, 0.5)
    assert s.disabled == pytest.approx(0.3)
    with pytest.raises(DomainError):
        AdoptionState(0.7, 0.5)
    with pytest.raises(DomainError):
        AdoptionState(-0.1, 0.5)


def test_frozen(params):
    with pytest.raises(Exception):
        params.gamma = 2.0
    assert r1(gamma=2.0).gamma == 2.0


def test_conditional_costs_recursion(params):
    k, mu = params.costs, params.threat.mu
    for x in (0.0, 0.4, 1.0):
        a, b = model.conditional_costs(x, params)
        eta = model.mix_rate(x, 0.4, 1.0, params.threat)
        assert b == pytest.approx(eta / (k.r + eta) * a, rel=1e-10)
        assert a == pytest.approx(k.c1i + k.c2i / (mu + k.r) + mu * b / (mu + k.r), rel=1e-10)
        p = model.stationary_intrusion_probability(x, params)
        assert -(p * a + (1 - p) * b) == pytest.approx(model.utility_nonadopter(x, params), rel=1e-12)


def test_limit_values_and_convergence(params):
    g_n, g_e = model.limit_scaled_utilities(0.0, params)
    assert g_n == pytest.approx(-2 / 3) and g_e == pytest.approx(-0.6608696, abs=1e-7)
    devs = [abs(r * model.utility_nonadopter(0.3, params.replace(r=r)) - model.limit_scaled_utilities(0.3, params)[0])
            for r in (1e-2, 1e-4, 1e-6)]
    assert devs[0] > devs[1] > devs[2]


def test_monotone_in_adoption(params):
    x = np.linspace(0, 1, 200)
    assert np.all(np.diff(model.utility_nonadopter(x, params)) > 0)
    assert np.all(np.diff(model.utility_adopter(x, params)) >= 0)
    flat = r1(Pi1=1.0)
    assert np.ptp(model.utility_nonadopter(x, flat)) == 0.0
    assert np.all(model.gap_slope(x, flat) == 0.0)


def test_useless_free_firewall():
    p = ModelParams.from_flat(mu=1, lam=0.5, r=0.5, c0=0, c=0, c1i=1, c2i=1, pi0=1, pi1=1, Pi0=1, Pi1=1)
    x = np.linspace(0, 1, 5)
    np.testing.assert_allclose(model.utility_adopter(x, p), model.utility_nonadopter(x, p))
