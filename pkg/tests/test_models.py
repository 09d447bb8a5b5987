import math

import numpy as np
import pytest

from hybridint.core import FROM_NEGATIVE, FROM_POSITIVE, make_state, state_from_z
from hybridint.models import DiskParams, PendulumParams, build_disk, build_model, build_pendulum
from hybridint.models.disk import LOWER, UPPER
from hybridint.verify import sample_surface


def test_param_validation():
    with pytest.raises(ValueError):
        DiskParams(h=2.0)
    with pytest.raises(ValueError):
        DiskParams(e=1.5)
    with pytest.raises(ValueError):
        DiskParams(k=0.0)
    with pytest.raises(ValueError):
        PendulumParams(l=-1.0)
    with pytest.raises(ValueError):
        build_model("spring")
    with pytest.raises(TypeError):
        build_model("pendulum", R=2.0)


def test_disk_components(disk):
    lower, upper = disk.system.components
    assert lower.approach == FROM_POSITIVE and upper.approach == FROM_NEGATIVE
    assert disk.walls == {LOWER: 1.0, UPPER: 2.0}
    x = make_state([0.0, 1.0, 0.0], [1.0, -2.0, 1.0])
    assert np.allclose(lower.impact(x).p, [1.0, 1.0, 1.0])
    assert lower.on_surface(x) and not upper.on_guard(x)


def test_disk_grazing_contact(disk):
    x = make_state([0.0, 1.0, 0.0], [0.4, 0.0, 0.4])
    assert disk.system.components[LOWER].impact(x).p[1] == 0.0


def test_disk_elastic_rolling_impact_preserves_everything():
    model = build_disk(DiskParams(e=1.0))
    x = make_state([0.3, 1.0, 0.2], [0.7, -1.1, 0.7])
    y = model.system.components[LOWER].impact(x)
    assert np.allclose(model.integrals.values(y), model.integrals.values(x), atol=1e-15)


@pytest.mark.parametrize("e", [0.0, 0.5, 1.0])
def test_disk_impact_identities_on_exact_surface(e, rng):
    model = build_disk(DiskParams(e=e))
    f1, f2, f3 = model.integrals
    for comp in model.system.components:
        a = model.walls[comp.component_id]
        for x in sample_surface(model.system, comp, rng, model.box, 500):
            y = comp.impact(x)
            assert abs(f1(y) - f1(x)) < 1e-12
            assert abs(f3(y) - f3(x)) < 1e-12
            assert abs(f2(y) - (e * e * f2(x) + 0.5 * (1 - e * e) * a * a)) < 1e-12


def test_disk_off_rolling_locus_changes_f1(disk):
    x = make_state([0.0, 1.0, 0.0], [1.0, -1.0, 0.0])
    f1 = disk.integrals[0]
    assert abs(f1(disk.system.components[LOWER].impact(x)) - f1(x)) > 0.1


def test_disk_general_parameters_have_no_chart():
    model = build_disk(DiskParams(m=2.0, k=0.5))
    with pytest.raises(ValueError):
        model.require_chart()
    assert build_disk().require_chart().name == "disk"


def test_disk_hamiltonian_is_sum_of_integrals(rng):
    model = build_disk(DiskParams(m=1.7, R=0.8, k=1.3, Omega=0.6, h=4.0))
    for z in model.sample_box(rng, 50):
        x = state_from_z(z, model.system.angular)
        assert model.system.hamiltonian(x) == pytest.approx(sum(model.integrals.values(x)), rel=1e-14)


def test_pendulum_impact_examples(pendulum):
    floor = pendulum.system.components[0]
    x = make_state([math.pi / 2], [2.0], (True,))
    assert np.allclose(floor.impact(x).z, [math.pi / 2, -2.0])
    rest = make_state([math.pi / 2], [0.0], (True,))
    assert np.allclose(floor.impact(rest).z, rest.z)


@pytest.mark.parametrize("e", [0.0, 0.5, 1.0])
def test_pendulum_energy_jump_on_floor(e, rng):
    model = build_pendulum(PendulumParams(e=e))
    H = model.system.hamiltonian
    floor = model.system.components[0]
    for x in sample_surface(model.system, floor, rng, model.box, 1000):
        jump = H(floor.impact(x)) - H(x)
        assert abs(jump - 0.5 * (e * e - 1) * x.p[0] ** 2) < 1e-12
        if e == 1.0:
            assert abs(jump) < 1e-12


def test_pendulum_without_wall_has_no_components():
    assert build_pendulum(wall=False).system.components == ()
