import numpy as np
import pytest

from dimerstrip.dimermap import (DoubleRowConfig, FaceDimerRule, _FACE_TYPES, arrows_from_particles,
                                 check_covering, check_weight_consistency, config_weight,
                                 covered_sides, enumerate_double_row_configs, face_type, ice_rule,
                                 isotropic_weights, iter_double_row_configs, map_vertex_to_dimers,
                                 parse_dimer_text, particles_from_arrows)
from dimerstrip.statespace import DomainError, OccupationState
from dimerstrip.tl_algebra import Orientation
from dimerstrip.transfer import StripModel, double_row_transfer


def _states(big_n):
    return [OccupationState.from_index(i, big_n) for i in range(2**big_n)]


def test_weight_consistency_examples():
    assert check_weight_consistency(np.pi / 4, np.sqrt(2)) < 1e-15
    assert np.allclose(isotropic_weights(), (1, 1, 2, 1))
    rule = {f: FaceDimerRule.build(f, Orientation.BLUE, np.pi / 6, 1.0) for f in ("a1", "b1", "c1", "c2")}
    assert np.isclose(rule["a1"].total_weight, np.sqrt(3) / 2)
    assert np.isclose(rule["b1"].total_weight, 0.5)
    assert np.isclose(rule["c1"].total_weight, 1.0)
    assert rule["c2"].total_weight == 1.0
    for u in np.linspace(0.1, 1.4, 7):
        assert check_weight_consistency(u, 1.7) < 1e-14


@pytest.mark.parametrize("ori", list(Orientation))
def test_face_rules(ori):
    counts = {f: FaceDimerRule.build(f, ori, 0.3).dimer_count for f in ("a1", "a2", "b1", "b2", "c1", "c2")}
    assert counts == {"a1": 1, "a2": 1, "b1": 1, "b2": 1, "c1": 2, "c2": 1}
    assert FaceDimerRule.build("c2", ori, 0.3).options == (("", 1.0),)
    with pytest.raises(DomainError):
        FaceDimerRule.build("d1", ori, 0.3)


@pytest.mark.parametrize("ori", list(Orientation))
def test_vertex_particle_bijection(ori):
    for occ, ftype in _FACE_TYPES[ori].items():
        arrows = arrows_from_particles(occ, ori)
        assert particles_from_arrows(arrows, ori) == occ
        assert ice_rule(arrows)
        assert face_type(occ, ori) == ftype
        # the covered sides match the dimer tags
        tags = {t for t, _ in FaceDimerRule.build(ftype, ori, 0.3).options}
        sides = covered_sides(occ, ori)
        assert all(set(t.replace("+", "")) == sides for t in tags)
    with pytest.raises(DomainError):
        face_type((1, 1, 1, 0), ori)


@pytest.mark.parametrize("w", (0, 1))
@pytest.mark.parametrize("n", (1, 2, 3))
def test_brute_force_equals_transfer(n, w, rng):
    model = StripModel(n, w)
    u = rng.uniform(0.1, 1.4)
    d = np.asarray(double_row_transfer(model, u))
    for a in _states(model.big_n):
        for b in _states(model.big_n):
            r = enumerate_double_row_configs(model, a, b, u)
            assert abs(r.weighted_sum - d[b.index, a.index]) < 1e-11
            assert r.conserved_double_row
            assert r.dimer_count == round(r.isotropic_sum)
            assert abs(r.expansion_sum - r.isotropic_sum) < 1e-9


def test_single_rows_exchange_particles_with_boundary():
    model = StripModel(2)
    changes = [enumerate_double_row_configs(model, a, b).single_row_changes
               for a in _states(2) for b in _states(2)]
    assert any(changes)


def test_expansion_cardinality():
    model = StripModel(3)
    for a in _states(3):
        for b in _states(3):
            for cfg in iter_double_row_configs(model, a, b):
                c1 = sum(face_type(occ, ori) == "c1" for _, _, ori, occ in cfg.faces())
                dims = map_vertex_to_dimers(cfg)
                assert len(dims) == 2**c1
                # the isotropic c1 weight 2 equals the option count at unit weight each
                assert all(abs(dc.weight - 1.0) < 1e-12 for dc in dims)


def test_all_a_row_has_one_expansion():
    empty = OccupationState((0, 0, 0))
    cfg = DoubleRowConfig(empty.bits, (0, 0, 0), empty.bits, (0, 0, 0, 0), (0, 0, 0, 0))
    assert len(map_vertex_to_dimers(cfg)) == 1


def test_text_format_roundtrip():
    model = StripModel(2)
    cfg = next(iter_double_row_configs(model, OccupationState((1, 0)), OccupationState((1, 0))))
    for dc in map_vertex_to_dimers(cfg):
        parsed = parse_dimer_text(dc.to_text())
        assert parsed == [(r, c, t, o) for r, c, t, o, _ in dc.tokens]
    with pytest.raises(DomainError):
        parse_dimer_text("0:1:a1")


@pytest.mark.parametrize("w", (0, 1))
def test_dimer_coverings(w):
    model = StripModel(2, w)
    states = _states(model.big_n)
    for a in states:
        for b in states:
            for c in states:
                for lo in iter_double_row_configs(model, b, a):
                    for hi in iter_double_row_configs(model, c, b):
                        assert check_covering([lo, hi])


def test_covering_requires_matching_rows():
    model = StripModel(2)
    lo = next(iter_double_row_configs(model, OccupationState((0, 0)), OccupationState((0, 0))))
    hi = next(iter_double_row_configs(model, OccupationState((1, 0)), OccupationState((1, 0))))
    with pytest.raises(DomainError):
        check_covering([lo, hi])


def test_brute_force_limits():
    with pytest.raises(DomainError):
        list(iter_double_row_configs(StripModel(7), OccupationState((0,) * 7), OccupationState((0,) * 7)))
    with pytest.raises(DomainError):
        list(iter_double_row_configs(StripModel(2), OccupationState((0,)), OccupationState((0, 0))))


def test_config_weight_tracks_gauge_phase():
    a = OccupationState((1, 0))
    base, shifted = StripModel(2), StripModel(2, gauge_phase=0.4)
    for cfg in iter_double_row_configs(base, a, a):
        k = cfg.boundary_flux
        ratio = config_weight(shifted, 0.3, cfg) / config_weight(base, 0.3, cfg)
        assert np.isclose(ratio, np.exp(2j * 0.4 * k))
