import numpy as np
import pytest

from conftest import diamond
from epdyn import adiabatic, jordan
from epdyn.exceptions import EpdynError
from epdyn.models.diamond import build_diamond
from epdyn.models.stub import idx_a, idx_b


def stub_config(N=2, theta=np.pi / 2, kappa_d=4.0, j_ab=0.5, j_ad=1.0, j_bd=1.0):
    return adiabatic.AdiabaticStubConfig(
        N=N, j_ab=j_ab, j_ad=j_ad, j_bd=j_bd, theta=theta, kappa_d=kappa_d
    )


def diamond_config(eps=0.5, kappa=0.6, kappa_f=200.0, J=1.0):
    induced = (kappa, eps * kappa, eps * kappa, kappa)
    legs = tuple(np.sqrt(i * kappa_f / 2.0) for i in induced)
    return adiabatic.AdiabaticDiamondConfig(
        g=(J, eps * J, eps * J, J),
        g_first=legs,
        g_second=legs,
        thetas=(np.pi, np.pi, 0.0, 0.0),
        kappa_f=(kappa_f,) * 4,
    )


class TestInducedFormulas:
    def test_coupling_value(self):
        assert adiabatic.induced_coupling(1.0, 1.0, 4.0) == 0.5

    def test_decay_value(self):
        assert adiabatic.induced_decay(2.0, 8.0) == 2.0

    def test_positive_decay_required(self):
        with pytest.raises(EpdynError):
            adiabatic.induced_coupling(1.0, 1.0, 0.0)


class TestBuildFull:
    def test_decoupled_auxiliaries_block_diagonal(self):
        c = adiabatic.AdiabaticStubConfig(
            N=2, j_ab=1.0, j_ad=0.0, j_bd=0.0, theta=0.3, kappa_d=2.0
        )
        H, kappa = build = adiabatic.build_full(c)
        p = c.primary_dim
        assert np.all(H[:p, p:] == 0) and np.all(H[p:, :p] == 0)
        assert kappa[p:] == [2.0, 2.0]

    def test_stub_coefficients_entrywise(self):
        c = stub_config(theta=np.pi / 2, j_ab=0.7, j_ad=0.9, j_bd=1.1, kappa_d=5.0)
        H, kappa = adiabatic.build_full(c)
        p = c.primary_dim
        for n in (1, 2):
            a, b, aux = idx_a(n), idx_b(n), p + n - 1
            assert H[a, b] == H[b, a] == 0.7
            assert np.isclose(H[a, aux], 0.9j)
            assert np.isclose(H[aux, a], -0.9j)
            assert H[b, aux] == H[aux, b] == 1.1
            assert kappa[aux] == 5.0

    def test_diamond_is_eight_modes(self):
        H, kappa = adiabatic.build_full(diamond_config())
        assert H.shape == (8, 8)
        assert len(kappa) == 8
        assert np.linalg.norm(H - H.T) < 1e-12  # symmetric couplings


class TestEliminate:
    def test_induced_coupling_magnitude(self):
        c = stub_config(j_ab=0.0, j_ad=1.0, j_bd=1.0, kappa_d=4.0)
        H_eff = adiabatic.effective_model(c, include_induced_decay=False)
        a, b = idx_a(1), idx_b(1)
        assert np.isclose(H_eff[a, b], 0.5)  # j_ab + Jt
        assert np.isclose(H_eff[b, a], -0.5)  # j_ab - Jt

    def test_ep_condition_kills_downward_hopping(self):
        c = stub_config(j_ab=0.5, j_ad=1.0, j_bd=1.0, kappa_d=4.0)
        H_eff = adiabatic.effective_model(c, include_induced_decay=False)
        a, b = idx_a(1), idx_b(1)
        assert np.isclose(H_eff[a, b], 1.0)
        assert abs(H_eff[b, a]) < 1e-14

    def test_effective_stub_reproduces_ep_structure(self):
        c = stub_config(N=4, j_ab=0.5, j_ad=1.0, j_bd=1.0, kappa_d=4.0)
        H_eff = adiabatic.effective_model(c, include_induced_decay=False)
        structure = jordan.analyze(H_eff)
        zero = min(range(len(structure.clusters)), key=lambda i: abs(structure.clusters[i].value))
        assert [ch.length for ch in structure.chains[zero]] == [2]

    def test_theta_zero_reciprocal(self):
        c = stub_config(theta=0.0, j_ab=0.4, j_ad=0.8, j_bd=1.2, kappa_d=6.0)
        H_eff = adiabatic.effective_model(c, include_induced_decay=False)
        a, b = idx_a(1), idx_b(1)
        assert np.isclose(abs(H_eff[a, b]), abs(H_eff[b, a]))

    def test_diamond_mapping_exact(self):
        eps, kappa = 0.5, 0.6
        c = diamond_config(eps=eps, kappa=kappa)
        H_eff = adiabatic.effective_model(c, include_induced_decay=False)
        H_ref = build_diamond(diamond(eps, kappa))
        assert np.linalg.norm(H_eff - H_ref, 2) < 1e-12

    def test_zero_decay_rejected(self):
        H = np.zeros((3, 3), dtype=complex)
        with pytest.raises(EpdynError):
            adiabatic.eliminate(H, [0.0, 0.0, 0.0], [2])


class TestCompare:
    def test_decoupled_limit_identical(self):
        c = adiabatic.AdiabaticStubConfig(
            N=2, j_ab=1.0, j_ad=0.0, j_bd=0.0, theta=0.0, kappa_d=3.0
        )
        psi0 = np.zeros(c.primary_dim, dtype=complex)
        psi0[idx_b(2)] = 1.0
        err = adiabatic.compare_full_vs_effective(c, psi0, [0.5, 2.0, 8.0])
        assert np.max(err) <= 1e-10

    def test_fast_auxiliary_limit(self):
        c = stub_config(N=4, j_ab=0.5, j_ad=50.0, j_bd=50.0, kappa_d=1e4)
        psi0 = np.zeros(c.primary_dim, dtype=complex)
        psi0[idx_b(4)] = 1.0
        err = adiabatic.compare_full_vs_effective(c, psi0, np.linspace(0.5, 10.0, 20))
        assert np.max(err) <= 1e-2

    def test_error_ladder_monotone_both_models(self):
        times = np.linspace(0.5, 10.0, 10)
        maxima = []
        for kd in (1e2, 1e3, 1e4):
            scale = np.sqrt(kd / 4.0)  # keep Jt = 0.5 on every rung
            c = stub_config(N=4, j_ab=0.5, j_ad=scale, j_bd=scale, kappa_d=kd)
            psi0 = np.zeros(c.primary_dim, dtype=complex)
            psi0[idx_b(4)] = 1.0
            maxima.append(np.max(adiabatic.compare_full_vs_effective(c, psi0, times)))
        assert maxima[0] > maxima[1] > maxima[2]

        maxima = []
        for kf in (1e2, 1e3, 1e4):
            c = diamond_config(eps=0.5, kappa=0.6, kappa_f=kf)
            psi0 = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
            maxima.append(np.max(adiabatic.compare_full_vs_effective(c, psi0, times)))
        assert maxima[0] > maxima[1] > maxima[2]

    def test_first_order_error_scaling(self):
        times = np.linspace(0.5, 5.0, 8)
        errs = []
        for kd in (1e2, 1e3):
            scale = np.sqrt(kd / 4.0)
            c = stub_config(N=2, j_ab=0.5, j_ad=scale, j_bd=scale, kappa_d=kd)
            psi0 = np.zeros(c.primary_dim, dtype=complex)
            psi0[idx_b(2)] = 1.0
            errs.append(np.max(adiabatic.compare_full_vs_effective(c, psi0, times)))
        ratio = errs[0] / errs[1]
        assert 3.0 < ratio < 30.0  # consistent with error ~ c / kappa_d

    def test_initial_state_must_be_primary(self):
        c = stub_config()
        with pytest.raises(EpdynError):
            adiabatic.compare_full_vs_effective(
                c, np.zeros(c.dim, dtype=complex), [1.0]
            )
