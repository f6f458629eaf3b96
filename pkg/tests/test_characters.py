import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from monochar.characters import (
    CircleValue, cech_check, cech_rep, character, characteristic_class, circle_distance,
    evaluate, holonomy, predicted_string_defect, relation_defect, string_defect, winding_number,
)
from monochar.errors import CocycleError, IntegralityError, QuantizationError, SingularityError
from monochar.fields import FormField, MonopoleConfig, string_potential
from monochar.simplicial import (
    IntChain, boundary, cap, fundamental_cycle, latitude_loop, random_cycle, random_two_chain,
)


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_circle_value_arithmetic(a, b):
    x, y = CircleValue(a), CircleValue(b)
    assert 0.0 <= x.value < 1.0
    assert (x + y) == CircleValue(a + b)
    assert (x - y) == CircleValue(a - b)
    assert -x == CircleValue(-a)
    assert x.distance(y) == pytest.approx(circle_distance(a, b), abs=1e-9)
    assert x.distance(y) <= 0.5


def test_circle_value_equality():
    assert CircleValue(-0.5) == CircleValue(0.5)
    assert CircleValue(0.9999999999999998) == CircleValue(0.0)
    assert CircleValue(0.1, tol=1e-3) != CircleValue(0.2)
    assert CircleValue(1.0).value == 0.0


def test_character_construction(octa):
    K = octa[1]
    chi = character(MonopoleConfig(0.5), K)
    assert chi.chern == 1 and not chi.defective
    assert chi.summary() == {"g": 0.5, "chern": 1, "period": pytest.approx(1.0), "defect": 0.0}
    with pytest.raises(QuantizationError) as err:
        character(MonopoleConfig(0.3), K)
    assert err.value.defect == pytest.approx(0.4)
    z = character(MonopoleConfig(0.0), K)
    assert z.chern == 0
    assert evaluate(z, latitude_loop(K, 0.0)) == 0.0


def test_evaluate_equator(octa):
    K = octa[2]
    E = latitude_loop(K, 0.0)
    assert evaluate(character(MonopoleConfig(0.5), K), E) == CircleValue(0.5)
    assert evaluate(character(MonopoleConfig(1.0), K), E) == CircleValue(0.0)
    assert evaluate(character(MonopoleConfig(0.5), K), IntChain.zero(1)) == CircleValue(0.0)
    with pytest.raises(ValueError):
        evaluate(character(MonopoleConfig(0.5), K), IntChain(1, {0: 1}))


def test_evaluate_rejects_wrong_cap(octa):
    K = octa[1]
    chi = character(MonopoleConfig(0.5), K)
    E = latitude_loop(K, 0.0)
    with pytest.raises(ValueError):
        evaluate(chi, E, IntChain(2, {0: 1}))


def test_homomorphism(octa, rng):
    K = octa[2]
    chi = character(MonopoleConfig(1.5), K)
    for _ in range(50):
        a, b = random_cycle(K, rng), random_cycle(K, rng)
        assert evaluate(chi, a + b) == evaluate(chi, a) + evaluate(chi, b)


def test_relation_holds_when_quantized(octa, ico, rng):
    for K in (octa[2], ico[1]):
        chi = character(MonopoleConfig(0.5), K)
        for _ in range(50):
            C = random_cycle(K, rng)
            S = random_two_chain(K, rng)
            assert relation_defect(chi, C, S) < 1e-9
        F = fundamental_cycle(K)
        assert relation_defect(chi, random_cycle(K, rng), F) < 1e-9


def test_relation_fails_when_defective(octa):
    K = octa[2]
    chi = character(MonopoleConfig(0.25), K, allow_defective=True)
    E = latitude_loop(K, 0.0)
    assert relation_defect(chi, E, fundamental_cycle(K)) == pytest.approx(0.5, abs=1e-9)


def test_cap_independence(octa, rng):
    K = octa[2]
    F = fundamental_cycle(K)
    quantized = character(MonopoleConfig(1.0), K)
    defective = character(MonopoleConfig(0.3), K, allow_defective=True)
    for _ in range(100):
        C = random_cycle(K, rng)
        S1 = cap(K, C, root=int(rng.integers(K.count(2))))
        S2 = cap(K, C, root=int(rng.integers(K.count(2))))
        assert evaluate(quantized, C, S1) == evaluate(quantized, C, S2)
        gap = evaluate(defective, C, S1).distance(evaluate(defective, C, S1 + F))
        assert gap == pytest.approx(circle_distance(0.6, 0), abs=1e-9)


def test_holonomy_examples(octa):
    K = octa[2]
    E = latitude_loop(K, 0.0)
    h = lambda g, pole: holonomy(string_potential(MonopoleConfig(g), pole), K, E)
    assert h(0.5, "south") == CircleValue(0.5)
    assert h(0.5, "north") == CircleValue(0.5)
    assert h(0.3, "south") == CircleValue(0.3)
    assert h(0.3, "north") == CircleValue(0.7)
    assert h(0.3, "south") != h(0.3, "north")


def test_string_defect(octa):
    K = octa[2]
    E = latitude_loop(K, 0.0)
    assert string_defect(MonopoleConfig(1.0), K, E) < 1e-8
    assert string_defect(MonopoleConfig(0.25), K, E) == pytest.approx(0.5, abs=1e-8)
    # a small loop that does not go around the axis
    small = boundary(K, IntChain(2, {3: 1}))
    assert winding_number(K, small) == 0
    for g in (0.25, 0.3, 1.7):
        assert string_defect(MonopoleConfig(g), K, small) < 1e-8


def test_string_defect_matches_winding(octa, rng):
    K = octa[3]
    for g in (0.2, 0.25, 0.5, 1.0):
        cfg = MonopoleConfig(g)
        for z0 in (0.0, 0.4):
            C = latitude_loop(K, z0)
            for k in (1, 2, -1):
                w = winding_number(K, k * C)
                assert w == k
                assert string_defect(cfg, K, k * C) == pytest.approx(predicted_string_defect(cfg, w), abs=1e-8)


def test_two_pictures_agree(octa, rng):
    K = octa[3]
    south = np.array([0.0, 0.0, -1.0])
    for g in (0.5, 1.0, 1.5):
        chi = character(MonopoleConfig(g), K)
        A = string_potential(MonopoleConfig(g), "south")
        for z0 in (0.0, 0.5, -0.4):
            C = latitude_loop(K, z0)
            assert float(holonomy(A, K, C).distance(evaluate(chi, C))) < 1e-6
        for _ in range(20):
            C = boundary(K, random_two_chain(K, rng))
            try:
                hol = holonomy(A, K, C)
            except SingularityError:
                continue
            assert hol.distance(evaluate(chi, C)) < 1e-6


def test_flat_part_trivial(octa, rng):
    K = octa[3]
    for g in (0.5, 1.0):
        north = string_potential(MonopoleConfig(g), "north")
        south = string_potential(MonopoleConfig(g), "south")
        for z0 in (0.0, 0.3, -0.6):
            C = latitude_loop(K, z0)
            assert holonomy(north, K, C).distance(holonomy(south, K, C)) < 1e-8


def test_characteristic_class():
    from monochar.simplicial import sphere_mesh
    K = sphere_mesh("octahedron", 1)
    assert characteristic_class(character(MonopoleConfig(1.5), K)) == 3
    assert characteristic_class(character(MonopoleConfig(0.0), K)) == 0
    assert characteristic_class(character(MonopoleConfig(-1.0), K)) == -2
    with pytest.raises(IntegralityError) as err:
        characteristic_class(character(MonopoleConfig(0.3), K, allow_defective=True))
    assert err.value.defect == pytest.approx(0.4)


@pytest.mark.parametrize("n", [-3, -2, -1, 0, 1, 2, 3])
def test_cech(octa, n):
    K = octa[1]
    rep = cech_rep(n, MonopoleConfig(n / 2), K)
    report = cech_check(rep)
    assert report["pass"]
    assert report["winding"] == n == report["transition_winding"]
    assert report["characteristic_class"] == n
    assert report["max_cocycle_error"] < 1e-8


def test_cech_matches_character(octa):
    K = octa[1]
    assert cech_check(cech_rep(1, MonopoleConfig(0.5), K))["winding"] == \
        characteristic_class(character(MonopoleConfig(0.5), K))


def test_cech_rejects_mismatch(octa):
    K = octa[1]
    with pytest.raises(ValueError):
        cech_rep(2, MonopoleConfig(0.5), K)
    rep = cech_rep(1, MonopoleConfig(0.5), K)
    broken = type(rep)(rep.winding, rep.cfg, rep.mesh, rep.north_patch,
                       string_potential(MonopoleConfig(0.4), "north"))
    with pytest.raises(CocycleError):
        cech_check(broken)
