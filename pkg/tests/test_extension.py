import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from atomlab.atoms import AtomicFunction, SpecialAtom, haar_atom
from atomlab.errors import NoConvergence, NonIntegrableWeight, ToleranceNotMet
from atomlab.extension import (
    ANGULAR,
    MAX_LEVELS,
    RADIAL,
    ExtensionProvider,
    QuadratureSpec,
    _direct_norm,
    _separable_norm,
    atom_gradient,
    aw_norm,
    extend_atom_closed,
    extend_general,
    radial_limit,
)
from atomlab.geometry import TWO_PI, Cube, axis_pattern, checkerboard_pattern, parity_pattern
from atomlab.weights import ProductWeight, constant, power

# d = 1 atom on [2.5, 3.5), w = 1; reference norms from scipy.integrate.quad
# (nested adaptive quadrature split at the jump angles and toward r = 1)
ATOM1 = SpecialAtom(Cube((3.0,), (0.5,)), checkerboard_pattern(1), ProductWeight((constant(1.0),)))
NORM_ANGULAR_LEBESGUE = 0.3300514198730191
NORM_RADIAL_POWER2 = 0.08154775227471214


def test_quadrature_spec():
    q = QuadratureSpec()
    r = q.refined()
    assert (r.nodes_per_axis, r.levels, r.cheb) == (2 * q.nodes_per_axis, min(2 * q.levels, MAX_LEVELS), 33)
    with pytest.raises(ValueError):
        QuadratureSpec(levels=0)
    with pytest.raises(ValueError):
        QuadratureSpec(tol=0.0)


def test_extension_at_origin_is_mean():
    assert abs(extend_atom_closed(ATOM1, np.array([0.0]))) < 1e-15


@given(st.floats(0.0, 0.9), st.floats(0.0, TWO_PI))
def test_closed_form_matches_quadrature(r, t):
    z = np.array([r * np.exp(1j * t)])
    breaks = [(2.5, 3.0, 3.5)]
    ref = extend_general(ATOM1, z, QuadratureSpec(), breaks)
    assert extend_atom_closed(ATOM1, z) == pytest.approx(ref, abs=1e-10)


def test_extend_general_d2_and_smooth():
    atom = SpecialAtom(Cube((1.0, 2.0), (0.5, 0.5)), checkerboard_pattern(2), ProductWeight.lebesgue(2))
    z = np.array([0.3 + 0.2j, -0.4j])
    ref = extend_general(atom, z, QuadratureSpec(), [(0.5, 1.0, 1.5), (1.5, 2.0, 2.5)])
    assert extend_atom_closed(atom, z) == pytest.approx(ref, abs=1e-10)
    # Poisson extension of cos(xi) is z
    f = lambda x: np.cos(x[..., 0])
    assert extend_general(f, np.array([0.5 + 0.1j]), QuadratureSpec()) == pytest.approx(0.5 + 0.1j, abs=1e-12)


def test_extend_general_reports_tolerance():
    with pytest.raises(ToleranceNotMet):
        extend_general(ATOM1, np.array([0.9]), QuadratureSpec(nodes_per_axis=2, order=2, tol=1e-14))
    with pytest.raises(ValueError):
        extend_general(ATOM1, np.zeros((2, 1)))


@pytest.mark.parametrize("mask", [1, 2, 3])
def test_gradient_matches_finite_differences(mask, rng):
    atom = SpecialAtom(Cube((2.0, 4.0), (0.3, 0.6)), parity_pattern(2, mask), ProductWeight.power(1.0, 2))
    for _ in range(5):
        z = rng.uniform(0.1, 0.8, 2) * np.exp(1j * rng.uniform(0, TWO_PI, 2))
        g = atom_gradient(atom, z)
        for j in range(2):
            e = np.zeros(2)
            e[j] = 1e-6
            fd = (extend_atom_closed(atom, z + e) - extend_atom_closed(atom, z - e)) / 2e-6
            assert g[j] == pytest.approx(fd, rel=1e-6)


def test_provider_paths_agree():
    closed = ExtensionProvider.closed(ATOM1)
    quad = ExtensionProvider.quadrature(ATOM1, 1, QuadratureSpec(), [(2.5, 3.0, 3.5)])
    z = np.array([[0.5 * np.exp(2.9j)]])
    assert closed.value(z)[0] == pytest.approx(quad.value(z)[0], abs=1e-10)
    assert closed.gradient(z)[0, 0] == pytest.approx(quad.gradient(z)[0, 0], rel=1e-5)
    assert closed.is_closed and not quad.is_closed


def test_radial_limit_haar():
    h = haar_atom(2, 1, scale=TWO_PI)
    prov = ExtensionProvider.closed(h)
    lo, hi = h.cube.lower[0], h.cube.upper[0]
    res = radial_limit(prov, [lo + 0.3 * (hi - lo)])
    assert res.value == pytest.approx(-1 / h.wJ, abs=1e-6)
    assert res.ratio == pytest.approx(0.5, abs=0.05)
    res = radial_limit(prov, [5.0])
    assert abs(res.value) < 1e-6


def test_radial_limit_needs_radii():
    with pytest.raises(ValueError):
        radial_limit(ExtensionProvider.closed(ATOM1), [3.0], k0=4, k1=5)


def test_radial_limit_detects_non_contraction():
    slow = ExtensionProvider.closed(ATOM1)
    with pytest.raises(NoConvergence):
        radial_limit(slow, [3.0 + 1e-9], contraction=1e-3)


def test_norm_matches_reference():
    prov = ExtensionProvider.closed(ATOM1)
    res = aw_norm(prov, ProductWeight((constant(1.0),)), ANGULAR)
    assert res.value == pytest.approx(NORM_ANGULAR_LEBESGUE, rel=1e-8)
    assert res.path == "separable"
    res = aw_norm(prov, ProductWeight((power(2.0),)), RADIAL)
    assert res.value == pytest.approx(NORM_RADIAL_POWER2, rel=1e-8)


def test_norm_scales_with_coefficient():
    w = ProductWeight((constant(1.0),))
    a = aw_norm(ExtensionProvider.closed(AtomicFunction.single(ATOM1, -3.0)), w, ANGULAR).value
    assert a == pytest.approx(3 * NORM_ANGULAR_LEBESGUE, rel=1e-8)


@pytest.mark.parametrize("pattern", [checkerboard_pattern(2), axis_pattern(2, 0), axis_pattern(2, 1)])
def test_separable_matches_direct_d2(pattern):
    atom = SpecialAtom(Cube((2.0, 3.5), (0.4, 0.7)), pattern, ProductWeight.power(0.5, 2))
    prov = ExtensionProvider.closed(atom)
    w = ProductWeight.power(2.0, 2)
    # a coarse common rule keeps the 4-D direct sum small; the two paths then
    # differ only by the angle interpolation of the separable recursion
    q = QuadratureSpec(nodes_per_axis=4, levels=4, order=3)
    sep, _ = _separable_norm(1.0, atom, pattern.parity_mask(), w, RADIAL, 1.0, q)
    direct, _ = _direct_norm(prov, w, RADIAL, 1.0, q)
    assert sep == pytest.approx(direct, rel=1e-5)


def test_two_term_norm_uses_direct_path():
    other = SpecialAtom(Cube((1.0,), (0.25,)), checkerboard_pattern(1), ProductWeight((constant(1.0),)))
    f = AtomicFunction(((1.0, ATOM1), (0.5, other)))
    res = aw_norm(ExtensionProvider.closed(f), ProductWeight((constant(1.0),)), ANGULAR)
    assert res.path == "direct"
    # triangle inequality against the single-atom norms
    single = aw_norm(ExtensionProvider.closed(other), ProductWeight((constant(1.0),)), ANGULAR).value
    assert res.value <= NORM_ANGULAR_LEBESGUE + 0.5 * single + 1e-9


def test_radial_norm_rejects_nonintegrable_weight():
    with pytest.raises(NonIntegrableWeight):
        aw_norm(ExtensionProvider.closed(ATOM1), ProductWeight((power(0.0),)), RADIAL)


def test_norm_tolerance_and_arguments():
    prov = ExtensionProvider.closed(ATOM1)
    w = ProductWeight((power(0.5),))
    with pytest.raises(ToleranceNotMet):
        aw_norm(prov, w, RADIAL, q=QuadratureSpec(levels=4, norm_tol=1e-12))
    with pytest.raises(ValueError):
        aw_norm(prov, w, "sideways")
    with pytest.raises(ValueError):
        aw_norm(prov, w, RADIAL, p=0.5)
    with pytest.raises(ValueError):
        aw_norm(prov, ProductWeight.lebesgue(2), RADIAL)


def test_norm_p2_positive_and_stable():
    res = aw_norm(ExtensionProvider.closed(ATOM1), ProductWeight((power(2.0),)), RADIAL, p=2.0)
    assert res.value > 0 and res.rel_change < 0.01
