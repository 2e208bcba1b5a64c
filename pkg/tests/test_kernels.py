import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from atomlab.atoms import SpecialAtom
from atomlab.errors import DomainError, PatternUnsupported
from atomlab.extension import atom_gradient
from atomlab.geometry import Cube, axis_pattern, checkerboard_pattern
from atomlab.kernels import (
    TWO_PI,
    PolydiscPoint,
    calibrate_kappa,
    coordinate_primitive,
    coordinate_primitive_dz,
    grad_component,
    grad_components,
    grad_norm,
    k1,
    k1_direct,
    k2,
    kappa,
    log_shifted,
    poisson_factor,
    poisson_factor_dz,
    product_kernel,
)
from atomlab.weights import ProductWeight

# 30-digit reference values (mpmath, independent of this package)
Z0 = 0.3 + 0.4j
PRIM_1_2 = 1.90218141695136878737536952938 - 1.11733575101311639918613901247j
K2_2_025 = -0.0701358635096599767075408002452 + 0.0412127900635726705826423183457j
K1_2_025 = 0.0823742289032881486351049209023 + 0.0912528544366304043623023550714j
ZB = 0.999 * np.exp(3j)
K2_NEAR = -0.0198808596116225488963903482589j
K1_NEAR = -2.79308602935590142170879405845 + 19.5942038938151376982955809998j

discs = st.tuples(st.floats(0, 0.999), st.floats(0, TWO_PI)).map(lambda t: t[0] * np.exp(1j * t[1]))
angles = st.floats(0.0, TWO_PI)


def test_reference_values():
    assert coordinate_primitive(1.0, 2.0, Z0) == pytest.approx(PRIM_1_2, rel=1e-14)
    assert k2(2.0, 0.25, Z0) == pytest.approx(K2_2_025, rel=1e-13)
    assert k1(2.0, 0.25, Z0) == pytest.approx(K1_2_025, rel=1e-13)
    # near the boundary the input rounding alone is amplified by about 1/(1 - |z|)
    assert abs(k2(3.0, 1e-4, ZB) - K2_NEAR) < 1e-10 * abs(K2_NEAR)
    assert k1(3.0, 1e-4, ZB) == pytest.approx(K1_NEAR, rel=1e-10)


@given(discs, angles)
def test_real_part_is_poisson_kernel(z, xi):
    r, t = abs(z), np.angle(z)
    classical = (1 - r * r) / (1 - 2 * r * np.cos(xi - t) + r * r)
    assert np.real(poisson_factor(z, xi)) == pytest.approx(classical, rel=1e-10, abs=1e-12)


@given(discs, angles)
def test_poisson_dz_matches_difference(z, xi):
    if abs(z) > 0.99:
        return
    hstep = 1e-6
    fd = (poisson_factor(z + hstep, xi) - poisson_factor(z - hstep, xi)) / (2 * hstep)
    assert poisson_factor_dz(z, xi) == pytest.approx(fd, rel=1e-5, abs=1e-6)


def test_domain_checks():
    with pytest.raises(DomainError):
        poisson_factor(1.0, 0.0)
    with pytest.raises(DomainError):
        k2(1.0, 0.1, 1.5j)
    with pytest.raises(DomainError):
        PolydiscPoint([1.0], [0.0])


def test_polydisc_point():
    p = PolydiscPoint.from_complex([0.5j, -0.25])
    np.testing.assert_allclose(p.z, [0.5j, -0.25], atol=1e-16)
    assert p.d == 2
    assert product_kernel(p, [0.0, 1.0]) == pytest.approx(np.prod(poisson_factor(p.z, [0.0, 1.0])))


@given(discs, angles)
def test_log_shifted_is_a_logarithm(z, theta):
    assert np.exp(log_shifted(theta, z)) == pytest.approx(np.exp(1j * theta) - z, abs=1e-12)


@given(discs, st.floats(0.0, 6.0), st.floats(1e-6, 0.2))
def test_primitive_additive(z, lo, w):
    mid, hi = lo + w, lo + 2 * w
    total = coordinate_primitive(lo, mid, z) + coordinate_primitive(mid, hi, z)
    assert coordinate_primitive(lo, hi, z) == pytest.approx(total, rel=1e-9, abs=1e-13)


@given(discs)
def test_primitive_full_circle(z):
    # mean value property: the integral of P over a period is 2 pi
    assert coordinate_primitive(0.0, TWO_PI, z) == pytest.approx(TWO_PI, abs=1e-11)


@given(st.floats(0.0, 0.95), angles, st.floats(0.5, 3.0), st.floats(0.05, 0.5))
def test_primitive_dz_matches_difference(r, t, a, h):
    z = r * np.exp(1j * t)
    s = 1e-6
    fd = (coordinate_primitive(a - h, a + h, z + s) - coordinate_primitive(a - h, a + h, z - s)) / (2 * s)
    assert coordinate_primitive_dz(a - h, a + h, z) == pytest.approx(fd, rel=1e-6, abs=1e-7)


@given(st.floats(0.0, 0.9), angles, st.floats(0.5, 5.5), st.floats(1e-3, 0.5))
def test_k1_stable_form_matches_definition(r, t, a, h):
    z = r * np.exp(1j * t)
    assert k1(a, h, z) == pytest.approx(k1_direct(a, h, z), rel=1e-7, abs=1e-9)


@given(discs, st.floats(1.0, 5.0), st.floats(1e-3, 1.0))
def test_k2_derivative_is_two_k1(z, a, h):
    # d K2 / dz = 2 K1 (both factors come from the same logarithms)
    if abs(z) > 0.95:
        return
    s = 1e-6
    fd = (k2(a, h, z + s) - k2(a, h, z - s)) / (2 * s)
    assert 2 * k1(a, h, z) == pytest.approx(fd, rel=1e-5, abs=1e-7)


def test_k2_vanishes_at_origin():
    assert abs(k2(1.3, 0.4, 0.0)) < 1e-16


def test_kappa_values_and_calibration():
    assert [kappa(d) for d in (1, 2, 3)] == [2.0, -2.0, 2.0]
    for d in (1, 2, 3):
        ratios = calibrate_kappa(d, points=5)
        np.testing.assert_allclose(ratios, kappa(d), rtol=1e-6)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_grad_components_match_subcube_gradient(d, rng):
    cube = Cube(tuple(rng.uniform(2, 4, d)), tuple(rng.uniform(0.1, 0.8, d)))
    atom = SpecialAtom(cube, checkerboard_pattern(d), ProductWeight.power(0.5, d))
    z = rng.uniform(0, 0.95, (30, d)) * np.exp(1j * rng.uniform(0, TWO_PI, (30, d)))
    np.testing.assert_allclose(grad_components(atom, z), atom_gradient(atom, z), rtol=1e-9, atol=1e-12)
    assert grad_component(atom, d - 1, z[0]) == pytest.approx(atom_gradient(atom, z[0])[d - 1])
    g = grad_components(atom, z)
    np.testing.assert_allclose(grad_norm(g), np.linalg.norm(g, axis=-1))


def test_grad_requires_checkerboard():
    atom = SpecialAtom(Cube((1.0, 1.0), (0.5, 0.5)), axis_pattern(2, 0), ProductWeight.lebesgue(2))
    with pytest.raises(PatternUnsupported):
        grad_components(atom, np.array([0.1, 0.2]))
    with pytest.raises(ValueError):
        grad_component(SpecialAtom(Cube((1.0,), (0.5,)), checkerboard_pattern(1), ProductWeight.lebesgue(1)),
                       1, np.array([0.1]))
