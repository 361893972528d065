import math

import numpy as np
import pytest

from instantons import instanton
from instantons.errors import FitUnstable, NonAdjacentWells
from instantons.potentials import PotentialModel


@pytest.fixture(scope="module")
def tw4():
    return instanton.numeric_instanton(PotentialModel.triple_well(4.0), 0.0, 1.0)


def test_closed_form_shape():
    prof = instanton.closed_form_instanton(2.0)
    assert prof(0.0) == pytest.approx(1 / math.sqrt(2))
    assert prof(-30.0) < 1e-12 and prof(30.0) == pytest.approx(1.0)
    taus = np.linspace(-5, 5, 101)
    assert instanton.bogomolnyi_residual(prof, taus) < 1e-12


def test_closed_form_rejects_bad_omega():
    with pytest.raises(ValueError):
        instanton.closed_form_instanton(0.0)


def test_numeric_matches_closed_form_at_omega_4(tw4):
    exact = instanton.closed_form_instanton(4.0)
    taus = np.linspace(-5, 5, 2001)
    assert np.max(np.abs(tw4(taus) - exact(taus))) < 1e-8
    assert np.max(np.abs(tw4.velocity(taus) - exact.velocity(taus))) < 1e-7
    assert tw4.action == pytest.approx(1.0, abs=1e-10)


def test_curvature_limits(tw4):
    assert tw4.curvature(-20.0) == pytest.approx(16.0, rel=1e-9)
    assert tw4.curvature(20.0) == pytest.approx(64.0, rel=1e-9)
    assert tw4.asymptotic_curvatures == (16.0, 64.0)


def test_double_well_action():
    prof = instanton.numeric_instanton(PotentialModel.double_well(3.0), -1.0, 1.0)
    assert prof.action == pytest.approx(2.0, abs=1e-10)
    D, C = prof.amplitude_constants
    assert D == pytest.approx(math.sqrt(18.0), rel=1e-6)
    assert C == pytest.approx(math.sqrt(18.0), rel=1e-6)


def test_non_adjacent_wells():
    with pytest.raises(NonAdjacentWells):
        instanton.numeric_instanton(PotentialModel.triple_well(1.0), -1.0, 1.0)


def test_invalid_wells():
    model = PotentialModel.triple_well(1.0)
    with pytest.raises(ValueError):
        instanton.numeric_instanton(model, 0.0, 0.5)
    with pytest.raises(ValueError):
        instanton.numeric_instanton(model, 0.0, 0.0)


def test_lateral_to_central_direction():
    prof = instanton.numeric_instanton(PotentialModel.triple_well(1.0), 1.0, 0.0)
    assert prof(-30.0) == pytest.approx(1.0, abs=1e-9)
    assert prof(30.0) == pytest.approx(0.0, abs=1e-9)
    assert prof.velocity(0.0) < 0


def test_transforms():
    prof = instanton.closed_form_instanton(1.0)
    rev = instanton.transform(prof, "time_reverse")
    ref = instanton.transform(prof, instanton.Transform.SPACE_REFLECT)
    shifted = instanton.transform(prof, "translate", 2.0)
    taus = np.linspace(-4, 4, 9)
    assert np.allclose(rev(taus), prof(-taus))
    assert np.allclose(ref(taus), -prof(taus))
    assert np.allclose(shifted(taus + 2.0), prof(taus))
    for p in (rev, ref, shifted):
        assert instanton.bogomolnyi_residual(p, taus) < 1e-12
        assert p.action == prof.action


def test_zero_mode_is_normalized_velocity():
    prof = instanton.closed_form_instanton(1.0)
    mode = instanton.zero_mode(prof)
    assert mode.norm_check == pytest.approx(1.0, abs=1e-10)
    assert mode.values(0.0) == pytest.approx(prof.velocity(0.0) / 0.5)


def test_tail_constants_closed_form():
    prof = instanton.closed_form_instanton(4.0)
    assert instanton.asymptotic_constants(prof) == (4.0, 4.0)
    D, C = instanton.asymptotic_constants(prof, fit=True)
    assert D == pytest.approx(4.0, abs=1e-6) and C == pytest.approx(4.0, abs=1e-6)


def test_fit_unstable_for_slowly_converging_tails():
    prof = instanton.numeric_instanton(PotentialModel.double_well(1.0), -1.0, 1.0)
    with pytest.raises(FitUnstable):
        instanton.asymptotic_constants(prof, fit=True)


def test_translation_keeps_center():
    prof = instanton.numeric_instanton(PotentialModel.triple_well(1.0), 0.0, 1.0, tau_c=3.0)
    assert prof(3.0) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
