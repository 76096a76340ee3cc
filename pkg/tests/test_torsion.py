"""Continuum spectra, heat traces, zeta(0), Dedekind eta, closed-form torsions."""

import math
from fractions import Fraction

import numpy as np
import pytest

from torsionlab import surfaces, torsion as ts
from torsionlab.errors import EtaDomainError


def test_continuum_spectrum_examples():
    sp = ts.continuum_spectrum("rectangle", 1, 1, 20)
    assert np.allclose(sp[:4], [0.0, math.pi ** 2, math.pi ** 2, 2 * math.pi ** 2])
    sp = ts.continuum_spectrum("torus", 1, 1, 40)
    assert sp[0] == 0.0
    assert np.allclose(sp[1:5], [4 * math.pi ** 2] * 4)
    assert len(sp) >= 5
    sp = ts.continuum_spectrum("cylinder", 1, 1, 42)
    # 0, pi^2 (k=1), 4 pi^2 (m = +-1 and k=2)
    assert sp[0] == 0.0 and abs(sp[1] - math.pi ** 2) < 1e-12
    assert np.allclose(sp[2:5], [4 * math.pi ** 2] * 3)


def test_continuum_spectrum_type():
    sp = ts.ContinuumSpectrum("rectangle", 1, 1)
    assert sp.counting_function(20.0) == 4
    total, tail = sp.zeta_partial(2.0, 1e5)
    assert tail < 1e-6
    lams = sp.eigenvalues(1e5)
    direct = sum(x ** -2.0 for x in lams[1:])
    assert abs(total - direct) < 1e-15
    # the tail bound really does bound the dropped modes
    more = sum(x ** -2.0 for x in sp.eigenvalues(4e5) if x > 1e5)
    assert more <= tail


def test_weyl_counting():
    cutoff = 1e4
    for kind, a, b in (("rectangle", 1, 2), ("torus", 1, 1)):
        n_modes = len(ts.continuum_spectrum(kind, a, b, cutoff))
        expect = a * b * cutoff / (4 * math.pi)
        assert abs(n_modes / expect - 1) < 0.05


def test_heat_trace_values():
    tr = ts.heat_trace("rectangle", 1, 1, 0.1)
    series = sum(math.exp(-0.1 * lam) for lam in
                 ts.continuum_spectrum("rectangle", 1, 1, 400.0))
    assert abs(tr - series) < 1e-12
    expansion = ts.heat_trace_expansion("rectangle", 1, 1, 0.1)
    assert abs(expansion - (1 / (0.4 * math.pi) + 2 / (4 * math.sqrt(0.1 * math.pi)) + 0.25)) < 1e-12
    # at t = 0.1 on the unit square the remainder is a few 1e-4, not smaller
    assert 1e-5 < abs(tr - expansion) < 1e-3


def test_heat_trace_torus_no_boundary_terms():
    for t in (0.02, 0.05):
        tr = ts.heat_trace("torus", 2, 2, t)
        assert abs(tr - 4 / (4 * math.pi * t)) < 2e-3
    # exponential decay of the remainder as t -> 0
    r1 = abs(ts.heat_trace("torus", 1, 1, 0.02) - 1 / (4 * math.pi * 0.02))
    r2 = abs(ts.heat_trace("torus", 1, 1, 0.01) - 1 / (4 * math.pi * 0.01))
    assert r2 < 1e-3 * r1


def test_heat_trace_cylinder_boundary_term():
    t = 0.05
    tr = ts.heat_trace("cylinder", 4, 2, t)
    exp_full = ts.heat_trace_expansion("cylinder", 4, 2, t)
    assert abs(tr - exp_full) < 1e-6
    # the boundary contribution 2a/(8 sqrt(pi t)) is genuinely present
    assert abs(tr - 8 / (4 * math.pi * t)) > 1.0


@pytest.mark.parametrize("kind,a,b", [("rectangle", 2, 2), ("rectangle", 3, 2),
                                      ("torus", 4, 4), ("cylinder", 4, 2)])
def test_heat_trace_expansion_window(kind, a, b):
    worst = max(abs(ts.heat_trace(kind, a, b, t) - ts.heat_trace_expansion(kind, a, b, t))
                for t in np.linspace(0.02, 0.2, 19))
    assert worst < 1e-5


def test_heat_trace_small_surfaces_large_t_residuals():
    # the expansion is asymptotic in t: on unit-size surfaces the window
    # [0.02, 0.2] is not yet asymptotic and the residuals are macroscopic
    resid = abs(ts.heat_trace("torus", 1, 1, 0.2) - ts.heat_trace_expansion("torus", 1, 1, 0.2))
    assert resid > 0.5
    resid = abs(ts.heat_trace("rectangle", 1, 1, 0.2)
                - ts.heat_trace_expansion("rectangle", 1, 1, 0.2))
    assert 0.01 < resid < 0.03


def test_zeta_zero_exact_values():
    assert ts.zeta_zero(surfaces.geometry_summary(surfaces.rectangle(1, 1))) == Fraction(-3, 4)
    assert ts.zeta_zero(surfaces.geometry_summary(surfaces.rectangle(3, 2))) == Fraction(-3, 4)
    assert ts.zeta_zero(surfaces.geometry_summary(surfaces.lshape())) == Fraction(-13, 18)
    assert ts.zeta_zero(surfaces.geometry_summary(surfaces.torus(1, 1))) == Fraction(-1)
    assert ts.zeta_zero(surfaces.geometry_summary(surfaces.cylinder(3, 2))) == Fraction(-1)
    # rank doubling doubles the angle part; trivial rank-2 bundle has dim H0 = 2
    assert ts.zeta_zero(surfaces.geometry_summary(surfaces.rectangle(1, 1)),
                        rank=2, dim_h0=2) == Fraction(-3, 2)
    # slit: one 2 pi corner and six right corners
    assert ts.zeta_zero(surfaces.geometry_summary(surfaces.slit())) == Fraction(-11, 16)
    # cone pi: (16 - 4)/8 = 3/2 plus two right corners
    assert ts.zeta_zero(surfaces.geometry_summary(surfaces.cone_model(1))) == Fraction(-3, 4)


def test_zeta_zero_simply_connected_shortcut():
    # for planar domains whose non-right corners are all 3 pi/2 the value is
    # -1 + 1/4 + #nonright/36
    for surf, nonright in ((surfaces.rectangle(2, 2), 0), (surfaces.lshape(), 1)):
        z = ts.zeta_zero(surfaces.geometry_summary(surf))
        assert z == Fraction(-1) + Fraction(1, 4) + Fraction(nonright, 36)


def test_zeta_zero_mellin_cross_check():
    z = ts.zeta_zero_from_heat_trace("rectangle", 1, 1, dim_h0=1)
    assert abs(z - (-0.75)) < 1e-6
    z = ts.zeta_zero_from_heat_trace("torus", 1, 1, dim_h0=1)
    assert abs(z - (-1.0)) < 1e-6
    z = ts.zeta_zero_from_heat_trace("cylinder", 2, 1, dim_h0=1)
    assert abs(z - (-1.0)) < 1e-6


def test_dedekind_eta():
    v = ts.dedekind_eta(math.exp(-2 * math.pi))
    assert abs(v - math.gamma(0.25) / (2 * math.pi ** 0.75)) < 1e-12
    # q -> 0: eta(q)/q^{1/24} -> 1
    q = 1e-12
    assert abs(ts.dedekind_eta(q) / q ** (1 / 24) - 1.0) < 1e-11
    # sampled shape: the q^{1/24} factor wins below the interior maximum near
    # q ~ 0.0372, after which the product factor makes eta strictly decreasing
    rising = np.linspace(0.001, 0.035, 12)
    vals = [ts.dedekind_eta(q) for q in rising]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    falling = np.linspace(0.05, 0.9, 25)
    vals = [ts.dedekind_eta(q) for q in falling]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    for bad in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(EtaDomainError):
            ts.dedekind_eta(bad)


def test_eta_modular_symmetry():
    for r in (2.0, 3.0, 2.5):
        lhs = r * ts.dedekind_eta(math.exp(-2 * math.pi * r)) ** 4
        rhs = (1 / r) * ts.dedekind_eta(math.exp(-2 * math.pi / r)) ** 4
        assert abs(lhs - rhs) < 1e-12 * abs(lhs)


def test_torus_torsion():
    log_eta_i = math.log(ts.dedekind_eta(math.exp(-2 * math.pi)))
    assert abs(ts.torus_torsion(1, 1) - 4 * log_eta_i) < 1e-14
    assert abs(ts.torus_torsion(2, 2) - (ts.torus_torsion(1, 1) + 2 * math.log(2))) < 1e-12
    assert abs(ts.torus_torsion(1, 2) - ts.torus_torsion(2, 1)) < 1e-12
    assert abs(ts.torus_torsion(1, 1) - (-1.0546883)) < 1e-6


def test_rectangle_torsion():
    log_eta_i = math.log(ts.dedekind_eta(math.exp(-2 * math.pi)))
    assert abs(ts.rectangle_torsion(1, 1) - (log_eta_i + 1.5 * math.log(2))) < 1e-14
    assert abs(ts.rectangle_torsion(1, 3) - ts.rectangle_torsion(3, 1)) < 1e-12
    expect = ts.rescale_torsion(ts.rectangle_torsion(1, 1), Fraction(-3, 4), 2)
    assert abs(ts.rectangle_torsion(2, 2) - expect) < 1e-12


def test_rescale_torsion():
    assert ts.rescale_torsion(1.23, -1.0, 1) == 1.23
    got = ts.rescale_torsion(ts.torus_torsion(1, 1), Fraction(-1), 3)
    assert abs(got - ts.torus_torsion(3, 3)) < 1e-12
    got = ts.rescale_torsion(ts.rectangle_torsion(1, 2), Fraction(-3, 4), 2)
    assert abs(got - ts.rectangle_torsion(2, 4)) < 1e-12
    got = ts.rescale_torsion(ts.cylinder_torsion(2, 1), Fraction(-1), 2)
    assert abs(got - ts.cylinder_torsion(4, 2)) < 1e-12


def test_zeta_consistency_of_cylinder_formula():
    # the half-torus-plus-circle split behind cylinder_torsion also fixes
    # zeta(0) = (1/2)(-1) + (-1/2) = -1, matching the direct angle formula
    assert ts.zeta_zero(surfaces.geometry_summary(surfaces.cylinder(3, 1))) == Fraction(-1)
