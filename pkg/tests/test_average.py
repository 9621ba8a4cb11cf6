import logging
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from pydantic import ValidationError

from app.exceptions.average import InvalidPartitionError, UndefinedExtensionError
from app.schemas.average import TaggedPartition
from app.schemas.construction import ConstructionSpec
from app.services.average import AverageService, tent_primitive
from app.services.construction import ConstructionService


def close(v, w, tol=1e-9):
    coords = set(v.entries) | set(w.entries)
    scale = 1.0 + max([abs(c) for c in v.entries.values()] + [abs(c) for c in w.entries.values()] + [0.0])
    return all(abs(v.coefficient(c) - w.coefficient(c)) <= tol * scale for c in coords)


THM14 = AverageService(ConstructionService(ConstructionSpec(p=0.5, variant="thm14")))

unit_points = st.floats(min_value=0.0, max_value=0.98, allow_nan=False)


def test_tent_primitive():
    assert tent_primitive(0.0) == 0.0
    assert tent_primitive(0.25) == 0.125
    assert tent_primitive(0.5) == 0.5
    assert tent_primitive(0.75) == 0.875
    assert tent_primitive(1.0) == 1.0


def test_block_weight(thm13):
    average = AverageService(thm13)
    for k in range(1, 40):
        left, right = thm13.node(k - 1), thm13.node(k)
        lam = thm13.lambda_(k)
        assert average.block_weight(k, 0.0, 1.0) == lam
        assert average.block_weight(k, right, 1.0) == 0.0
        assert average.block_weight(k, left, (left + right) / 2.0) == pytest.approx(lam / 2.0, rel=1e-9)


def test_integral_over_the_unit_interval_vanishes(variant):
    assert AverageService(variant).integral(0.0, 1.0).is_zero()


def test_integral_over_one_tent(variant):
    average = AverageService(variant)
    for k in range(1, 50):
        value = average.integral(variant.node(k - 1), variant.node(k))
        expected = variant.x_vector(k).scale(variant.lambda_(k))
        assert close(value, expected, tol=1e-12)


@given(a=unit_points, b=unit_points, c=unit_points)
@settings(max_examples=200)
def test_integral_is_additive(a, b, c):
    s, u, t = sorted((a, b, c))
    left = THM14.integral(s, u) + THM14.integral(u, t)
    assert close(left, THM14.integral(s, t), tol=1e-12)


@given(s=unit_points, t=unit_points)
@settings(max_examples=200)
def test_ave_is_symmetric(s, t):
    assert THM14.ave(s, t).value == THM14.ave(t, s).value


@given(s=unit_points, t=unit_points)
@settings(max_examples=200)
def test_difference_quotient_of_the_primitive(s, t):
    s, t = min(s, t), max(s, t)
    assume(t - s > 1e-3)
    quotient = (THM14.primitive(t) - THM14.primitive(s)).scale(1.0 / (t - s))
    assert close(quotient, THM14.ave(s, t).value, tol=1e-9)


def test_primitive_endpoints(variant):
    average = AverageService(variant)
    assert average.primitive(0.0).is_zero()
    assert average.primitive(1.0).is_zero()


def test_diagonal_is_f(variant):
    average = AverageService(variant)
    for k in range(1, 30):
        midpoint = variant.locate(variant.node(k - 1)).midpoint
        sample = average.ave(midpoint, midpoint)
        assert close(sample.value, variant.x_vector(k).scale(2.0))


def test_thm13_half_blocks_stay_at_one(thm13):
    average = AverageService(thm13)
    for q in range(1, 26):
        s, t = average.half_block_pair(q)
        assert average.ave(s, t).norm == pytest.approx(1.0, rel=1e-9)
    assert average.ave(1.0, 1.0).value.is_zero()


def test_thm15_half_blocks_blow_up(thm15):
    average = AverageService(thm15)
    norms = []
    for q in range(1, 41):
        norms.append(average.ave(*average.half_block_pair(q)).norm)
        assert norms[-1] == pytest.approx(math.sqrt(q), rel=1e-9)
    assert norms[15] == pytest.approx(4.0, rel=1e-9)
    assert norms[-1] > 6.0


@pytest.mark.parametrize("name", ["thm14", "thm15"])
def test_corner_is_undefined_without_separate_continuity(make_construction, name):
    average = AverageService(make_construction(p=0.5, variant=name))
    with pytest.raises(UndefinedExtensionError):
        average.ave(1.0, 1.0)
    assert average.ave(1.0, 0.5).norm >= 0.0


def test_blowup_rows(thm15, thm13):
    rows = AverageService(thm15).blowup_rows(4)
    assert [r.q for r in rows] == [1, 2, 3, 4]
    assert rows[-1].norm == pytest.approx(2.0, rel=1e-9)
    for row in AverageService(thm13).blowup_rows(25):
        assert row.norm == pytest.approx(row.predicted, rel=1e-9)
        assert row.predicted == 1.0


def test_blowup_stops_at_double_resolution(thm14, caplog):
    caplog.set_level(logging.WARNING)
    rows = AverageService(thm14).blowup_rows(60)
    assert 40 <= len(rows) < 60
    assert "double resolution" in caplog.text


# --- Riemann sums --------------------------------------------------------------

def test_single_cell_partition_tagged_at_one(variant):
    partition = TaggedPartition(nodes=[0.0, 1.0], tags=[1.0])
    assert AverageService(variant).riemann_sum(partition).is_zero()


def test_aligned_partition_over_full_blocks(variant):
    last = 8 * 9
    nodes = [variant.node(k) for k in range(last + 1)] + [1.0]
    tags = [(nodes[i] + nodes[i + 1]) / 2.0 for i in range(last)] + [1.0]
    total = AverageService(variant).riemann_sum(TaggedPartition(nodes=nodes, tags=tags))
    assert variant.lp.quasi_norm(total) <= 1e-10


@pytest.mark.slow
def test_riemann_sums_converge(thm14):
    rows = AverageService(thm14).riemann_rows(range(8, 17))
    assert [r.cells for r in rows][-1] == 2 ** 16
    assert rows[-1].norm <= 1e-2
    assert rows[-1].norm <= rows[0].norm


def test_partition_validation():
    with pytest.raises(ValidationError):
        TaggedPartition(nodes=[0.0, 0.5, 1.0], tags=[0.6, 0.7])
    with pytest.raises(ValidationError):
        TaggedPartition(nodes=[0.0, 0.5, 0.5, 1.0], tags=[0.1, 0.5, 0.7])
    with pytest.raises(ValidationError):
        TaggedPartition(nodes=[0.1, 1.0], tags=[0.5])
    with pytest.raises(InvalidPartitionError):
        AverageService.uniform_partition(0)
    with pytest.raises(InvalidPartitionError):
        THM14.riemann_rows([-1])


def test_random_tags_are_seeded():
    first = TaggedPartition.uniform(64, tag="random", seed=7)
    assert first == TaggedPartition.uniform(64, tag="random", seed=7)
    assert first.mesh == pytest.approx(1.0 / 64.0)


# --- scans -----------------------------------------------------------------------

def test_lipschitz_quotient_thm13(thm13):
    estimate = AverageService(thm13).lipschitz_quotient(9, aligned_q=20)
    assert estimate.same_block_quotient == pytest.approx(1.0, rel=1e-9)
    assert 1.0 - 1e-9 <= estimate.quotient <= 2.0 * (1.0 + 1e-9)


def test_lipschitz_quotient_thm15(thm15):
    estimate = AverageService(thm15).lipschitz_quotient(9, aligned_q=25)
    assert estimate.same_block_quotient == pytest.approx(5.0, rel=1e-9)
    assert estimate.quotient >= 5.0 * (1.0 - 1e-9)


def test_banach_control_windows_shrink(banach):
    average = AverageService(banach)
    sups = [average.window_sup(1.0 - 2.0 ** -m, 14) for m in range(2, 11)]
    for m, value in zip(range(2, 11), sups):
        assert value == pytest.approx(1.0 / (m + 1), rel=1e-9)
    assert all(a > b for a, b in zip(sups, sups[1:]))


def test_banach_control_mean_value_bound(banach):
    average = AverageService(banach)
    grid = sorted(set(np.linspace(0.0, 1.0, 9).tolist()) | set(average.aligned_points(6)))
    # ||f|| peaks at tent midpoints; blocks past 8 stay below the peaks of block 8
    midpoints = [banach.locate(banach.node(k - 1)).midpoint for k in range(1, 8 * 9 + 1)]
    for a, s in enumerate(grid):
        for t in grid[a + 1:]:
            samples = [s, t] + [u for u in midpoints if s <= u <= t]
            bound = max(banach.lp.quasi_norm(banach.f_eval(u)) for u in samples)
            assert average.ave(s, t).norm <= bound + 1e-9
    assert average.lipschitz_quotient(17, aligned_q=8).quotient <= 1.0 + 1e-9


def test_degenerate_scan(thm14):
    c = 0.3
    samples = AverageService(thm14).grid_scan((c, c), (c, c), 1)
    assert len(samples) == 1
    assert samples[0].value == thm14.f_eval(c)


def test_scan_skips_undefined_corner(thm15, caplog):
    caplog.set_level(logging.WARNING)
    samples = AverageService(thm15).grid_scan((0.5, 1.0), (0.5, 1.0), 2)
    assert [(s.s, s.t) for s in samples] == [(0.5, 0.5), (0.5, 1.0), (1.0, 0.5)]
    assert "skipping cell (1, 1)" in caplog.text


def test_scan_is_deterministic_and_row_major(thm13):
    average = AverageService(thm13)
    first = average.grid_scan((0.0, 0.9), (0.0, 0.9), 4, snap=True)
    assert first == average.grid_scan((0.0, 0.9), (0.0, 0.9), 4, snap=True)
    keys = [(s.s, s.t) for s in first]
    assert keys == sorted(keys)


def test_thm13_scan_pins_half_blocks_near_the_corner(make_construction):
    construction = make_construction(p=0.5, variant="thm13", q_cap=15)
    lo = construction.block_start(8)
    samples = AverageService(construction).grid_scan((lo, 1.0), (lo, 1.0), 2, snap=True)
    assert max(s.norm for s in samples) >= 1.0 - 1e-9
    towards_corner = [s for s in samples if s.t == 1.0 and s.s < 1.0]
    assert min(s.norm for s in towards_corner) == 0.0


def test_corner_is_undefined_when_tents_keep_their_height(make_construction):
    construction = make_construction(p=1.0, variant="thm13")
    average = AverageService(construction)
    with pytest.raises(UndefinedExtensionError):
        average.ave(1.0, 1.0)
    for q in (10, 30):
        k = q * q + 1
        midpoint = construction.locate(construction.node(k - 1)).midpoint
        assert average.ave(midpoint, midpoint).norm == pytest.approx(2.0, rel=1e-9)


def test_thm13_averages_beyond_q_cap(thm13):
    average = AverageService(thm13)
    sample = average.ave(0.5, 1.0 - 1e-6)
    assert sample.norm > 0.0
    samples = average.grid_scan((0.99999, 1.0), (0.99999, 1.0), 5)
    assert len(samples) == 25
    assert samples[-1].value.is_zero()


def test_scan_skips_cells_past_an_amplitude_table(make_construction, caplog):
    caplog.set_level(logging.WARNING)
    construction = make_construction(
        p=0.5, variant="custom", q_cap=5,
        amplitude={"kind": "table", "values": [1.0] * 5},
        weights={"kind": "geometric", "ratio": 0.5},
    )
    samples = AverageService(construction).grid_scan((0.0, 0.99), (0.0, 0.99), 2)
    assert [(s.s, s.t) for s in samples] == [(0.0, 0.0)]
    assert "skipping cell (0.0, 0.99)" in caplog.text


@pytest.mark.slow
def test_thm13_riemann_sums_on_fine_meshes(thm13):
    rows = AverageService(thm13).riemann_rows([16, 18])
    assert rows[0].norm <= 1e-2
    assert rows[1].cells == 2 ** 18
    assert math.isfinite(rows[1].norm)


def test_joint_modulus_shrinks_on_nested_grids(thm13):
    average = AverageService(thm13)
    moduli = []
    for n in (4, 8, 16, 32):
        grid = np.linspace(0.0, 0.75, n + 1).tolist()
        values = {(s, t): average.ave(s, t).value for s in grid for t in grid}
        worst = 0.0
        for a in range(n + 1):
            for b in range(n + 1):
                here = values[(grid[a], grid[b])]
                if a < n:
                    worst = max(worst, thm13.lp.distance(here, values[(grid[a + 1], grid[b])]))
                if b < n:
                    worst = max(worst, thm13.lp.distance(here, values[(grid[a], grid[b + 1])]))
        moduli.append(worst)
    assert all(x > y for x, y in zip(moduli, moduli[1:]))
    assert moduli[-1] < moduli[0] / 4.0
