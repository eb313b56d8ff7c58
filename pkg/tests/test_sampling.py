import math

import numpy as np
import pytest

from netsteer.assemblages import CorrelationTable
from netsteer.errors import PreconditionError
from netsteer.presets import bell_star, preset
from netsteer.sampling import EmpiricalTable, ShotPlan, estimate_criterion, sample, tuple_stream

SMALL = CorrelationTable((2,), (2,), {
    ((0,), 0): np.array([[0.1, 0.2], [0.3, 0.4]]),
    ((1,), 0): np.array([[0.5, 0.0], [0.0, 0.5]]),
})


def reference_counts(probs, seed, index, shots):
    """Inverse-CDF sampling written out with a plain loop over outcomes."""
    flat = probs.reshape(-1)
    counts = np.zeros(flat.size, dtype=int)
    raw = np.random.Philox(key=np.array([seed, index], dtype=np.uint64)).random_raw(shots)
    for word in raw:
        u = int(word >> np.uint64(11)) * 2.0**-53
        acc = 0.0
        for i, p in enumerate(flat):
            acc = 1.0 if i == flat.size - 1 else acc + p
            if u < acc:
                counts[i] += 1
                break
    return counts.reshape(probs.shape)


def test_shot_plan_validation():
    with pytest.raises(PreconditionError):
        ShotPlan(0)
    with pytest.raises(PreconditionError):
        ShotPlan(10, -1)
    assert ShotPlan(5.0, 3) == ShotPlan(5, 3)


def test_stream_words_are_stable():
    assert [int(v) for v in tuple_stream(7, 0).random_raw(3)] == [
        16086915834549238692, 5448529601018347655, 7749434361382612120]


def test_counts_follow_documented_algorithm():
    emp = sample(SMALL, ShotPlan(200, 7))
    for index, key in enumerate(SMALL.keys()):
        assert np.array_equal(emp.counts[key], reference_counts(SMALL[key], 7, index, 200))


def test_frozen_counts():
    emp = sample(SMALL, ShotPlan(20, 7))
    assert emp.counts[((0,), 0)].tolist() == [[3, 2], [6, 9]]
    assert emp.counts[((1,), 0)].tolist() == [[10, 0], [0, 10]]


def test_deterministic_table():
    t = CorrelationTable((1,), (2,), {((0,), 0): np.array([[0.0, 0.0], [1.0, 0.0]])})
    emp = sample(t, ShotPlan(1000, 1))
    assert emp.counts[((0,), 0)].tolist() == [[0, 0], [1000, 0]]


def test_same_seed_same_counts():
    a, b = sample(SMALL, ShotPlan(500, 3)), sample(SMALL, ShotPlan(500, 3))
    c = sample(SMALL, ShotPlan(500, 4))
    assert all(np.array_equal(a.counts[k], b.counts[k]) for k in SMALL.keys())
    assert any(not np.array_equal(a.counts[k], c.counts[k]) for k in SMALL.keys())


def test_counts_normalized_and_nonnegative():
    emp = sample(preset("bell-ghz").correlations(), ShotPlan(777, 5))
    for c in emp.counts.values():
        assert c.sum() == 777 and c.min() >= 0
    assert emp.frequencies().max_normalization_error() <= 1e-12


def test_large_sample_frequencies():
    table = bell_star(1).correlations()
    freq = sample(table, ShotPlan(10**6, 11)).frequencies()
    # 3 sigma multinomial bound is 3*sqrt(0.25/1e6) = 1.5e-3; the looser 5e-3 is the contract
    assert freq.max_abs_difference(table) <= 5e-3


@pytest.mark.parametrize("name", ["bell-ghz", "bell-star", "lsi-isotropic", "nonlinear-maxent"])
def test_infinite_shot_limit(name):
    p = preset(name)
    value, stderr = estimate_criterion(p.correlations(), p.table_criterion())
    assert value == pytest.approx(p.evaluate().value, abs=1e-12)
    assert stderr == 0


def test_ghz_estimate():
    p = preset("bell-ghz")
    value, stderr = estimate_criterion(sample(p.correlations(), ShotPlan(10**5, 2)), p.table_criterion())
    assert stderr < 0.05
    assert abs(value - 8) <= 3 * stderr


def test_bell_stderr_matches_analytic_variance():
    # CHSH at n=1: each of the 4 setting tuples (x, y) holds one +-1 correlator with |mean| 1/sqrt2
    p = bell_star(1)
    crit = p.table_criterion()
    emp = EmpiricalTable(*_exact_counts(p.correlations(), 10**4))
    _, stderr = estimate_criterion(emp, crit)
    e = 1 / math.sqrt(2)
    per_tuple_var = 1 - e**2
    assert stderr == pytest.approx(math.sqrt(4 * per_tuple_var / 10**4), rel=1e-6)


def _exact_counts(table, shots):
    counts = {k: table[k] * shots for k in table.keys()}
    return table.alice_settings, table.bob_outcomes, counts, shots, 0


def test_zero_correlation_stderr_scaling():
    t = CorrelationTable((2,), (2, 2), {((x,), y): np.full((2, 2), 0.25) for x in range(2) for y in range(2)})
    from netsteer.criteria import Correlator, TableCriterion

    crit = TableCriterion("zero", 1, (((1.0, Correlator((0,), 0)),),), ("t",), lambda v: float(v[0]),
                          1.0, "user", True, (), ())
    errs = [estimate_criterion(sample(t, ShotPlan(n, 9)), crit)[1] for n in (1000, 4000)]
    assert errs[0] / errs[1] == pytest.approx(2, rel=0.1)
    assert errs[0] == pytest.approx(1 / math.sqrt(1000), rel=0.1)


def test_missing_tuple():
    p = preset("bell-ghz")
    emp = sample(SMALL, ShotPlan(10, 0))
    with pytest.raises(PreconditionError):
        estimate_criterion(emp, p.table_criterion())


def test_monte_carlo_error_halves_when_shots_quadruple():
    p = bell_star(1)
    crit, table = p.table_criterion(), p.correlations()
    exact = crit.value(table)

    def median_error(shots):
        errs = [abs(estimate_criterion(sample(table, ShotPlan(shots, seed)), crit)[0] - exact)
                for seed in range(50)]
        return float(np.median(errs))

    ratio = median_error(2000) / median_error(8000)
    assert 2 * 0.7 <= ratio <= 2 * 1.3


def test_nonlinear_estimate_is_finite():
    p = preset("nonlinear-maxent")
    value, stderr = estimate_criterion(sample(p.correlations(), ShotPlan(10**4, 1)), p.table_criterion())
    assert 0 < stderr < 0.1
    assert abs(value - math.sqrt(2)) <= 3 * stderr


def test_single_shot_is_valid():
    p = preset("bell-ghz")
    value, stderr = estimate_criterion(sample(p.correlations(), ShotPlan(1, 0)), p.table_criterion())
    assert math.isfinite(value) and stderr >= 0
