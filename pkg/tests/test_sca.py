import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cryptrisc.crypto_isa import AES_SBOX, CryptoOp
from cryptrisc.power import LeakageConfig
from cryptrisc.sca import (
    INF_T,
    cpa,
    cpa_campaign,
    fisher_p_value,
    hw_sbox_hypothesis,
    pearson_matrix,
    tvla_campaign,
    welch_t,
    write_t_csv,
)


def brute_welch(a, b):
    """Textbook formula, one column at a time."""
    out = []
    for j in range(len(a[0])):
        ca, cb = [r[j] for r in a], [r[j] for r in b]
        ma, mb = sum(ca) / len(ca), sum(cb) / len(cb)
        va = sum((x - ma) ** 2 for x in ca) / (len(ca) - 1)
        vb = sum((x - mb) ** 2 for x in cb) / (len(cb) - 1)
        out.append((ma - mb) / math.sqrt(va / len(ca) + vb / len(cb)))
    return out


def brute_pearson(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def test_welch_examples():
    assert np.all(welch_t([[1.0, 2.0], [3.0, 5.0]], [[1.0, 2.0], [3.0, 5.0]]) == 0)
    assert welch_t([0, 0, 0, 0], [1, 1, 1, 1])[0] == -INF_T
    assert welch_t([1, 1, 1], [0, 0, 0])[0] == INF_T
    t = welch_t([0, 1, 0, 1], [1, 2, 1, 2])[0]
    assert t == pytest.approx(-1 / math.sqrt(1 / 6))
    assert t == pytest.approx(-2.449, abs=1e-3)


def test_welch_errors():
    with pytest.raises(ValueError):
        welch_t([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        welch_t(np.zeros((3, 2)), np.zeros((3, 3)))


def test_brute_force_equivalence():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        na, nb, m = rng.integers(2, 9), rng.integers(2, 9), rng.integers(1, 5)
        a, b = rng.normal(size=(na, m)), rng.normal(size=(nb, m))
        np.testing.assert_allclose(welch_t(a, b), brute_welch(a.tolist(), b.tolist()), rtol=1e-12)
        n = rng.integers(4, 9)
        x, y = rng.normal(size=(1, n)), rng.normal(size=(n, m))
        want = [brute_pearson(x[0].tolist(), y[:, j].tolist()) for j in range(m)]
        np.testing.assert_allclose(pearson_matrix(x, y)[0], want, rtol=1e-12)


# samples on a 1/8 grid so that shifting them stays exact
finite = st.integers(-8000, 8000).map(lambda v: v / 8)
groups = arrays(float, st.tuples(st.integers(2, 12), st.just(3)), elements=finite)


@settings(max_examples=200)
@given(groups, groups, st.floats(0.01, 100), finite)
def test_welch_symmetries(a, b, scale, shift):
    t = welch_t(a, b)
    np.testing.assert_array_equal(welch_t(b, a), -t)
    ok = np.abs(t) < 1e6  # scaling near-degenerate variances is ill-conditioned
    np.testing.assert_allclose(welch_t(a * scale, b * scale)[ok], t[ok], rtol=1e-6, atol=1e-6)
    np.testing.assert_allclose(welch_t(a + shift, b + shift)[ok], t[ok], rtol=1e-6, atol=1e-6)


@given(st.floats(-50, 50).filter(lambda v: abs(v) > 1e-3), st.floats(-50, 50))
def test_pearson_affine_invariance(scale, shift):
    rng = np.random.default_rng(3)
    x, y = rng.normal(size=(2, 30)), rng.normal(size=(30, 3))
    np.testing.assert_allclose(pearson_matrix(x, y * scale + shift), np.sign(scale) * pearson_matrix(x, y), atol=1e-9)


def test_pearson_constant_column_is_zero():
    r = pearson_matrix(np.arange(6.0)[None, :], np.ones((6, 1)))
    assert r[0, 0] == 0.0


def test_cpa_perfect_correlation():
    pt = np.arange(256, dtype=np.uint8)
    hyp = hw_sbox_hypothesis(pt)
    report = cpa(hyp[0x3C][:, None], pt, true_key=0x3C)
    assert report.best_guess == 0x3C and report.true_key_rank == 1
    assert report.max_abs_r[0x3C] == pytest.approx(1.0)
    assert hyp[5, 7] == bin(AES_SBOX[7 ^ 5]).count("1")


def test_cpa_null_noise_is_insignificant():
    rng = np.random.default_rng(1000)
    traces, pt = rng.normal(size=(1000, 4)), rng.integers(0, 256, 1000)
    report = cpa(traces, pt, true_key=0)
    assert report.p_value > 0.05
    assert min(fisher_p_value(r, 1000) * 4 * 256 for r in report.max_abs_r) > 0.05


def test_cpa_errors():
    with pytest.raises(ValueError):
        cpa(np.zeros((3, 1)), np.zeros(3, dtype=np.uint8))
    with pytest.raises(ValueError):
        cpa(np.zeros((5, 1)), np.zeros(4, dtype=np.uint8))
    with pytest.raises(ValueError):
        cpa_campaign(2, False, LeakageConfig(), 1)


def test_fisher_p_value():
    assert fisher_p_value(0.0, 100) == 1.0
    assert fisher_p_value(0.5, 3) == 1.0
    assert fisher_p_value(0.3, 1000) < 1e-10


def test_tvla_noiseless_masked_passes():
    report = tvla_campaign(CryptoOp.AES64_ENCS, 100, True, LeakageConfig(0.0), 42)
    assert report.verdict == "pass"


# values recorded from the seed-42 campaigns
GOLDEN_UNMASKED_ENCS = 7.500095738332159
GOLDEN_MASKED_ENCS = 1.2642294690639941


def test_tvla_golden_encs_and_report_format():
    cfg = LeakageConfig(1.0)
    bare = tvla_campaign(CryptoOp.AES64_ENCS, 4000, False, cfg, 42)
    masked = tvla_campaign(CryptoOp.AES64_ENCS, 4000, True, cfg, 42)
    assert bare.max_abs_t == pytest.approx(GOLDEN_UNMASKED_ENCS, rel=1e-12)
    assert masked.max_abs_t == pytest.approx(GOLDEN_MASKED_ENCS, rel=1e-12)
    assert bare.verdict == "fail" and masked.verdict == "pass"
    assert masked.max_abs_t < 2.0
    doc = json.loads(masked.to_json())
    assert {"t_values", "max_abs_t", "threshold", "verdict", "n_traces", "seed"} <= set(doc)
    assert doc["n_traces"] == 4000 and doc["threshold"] == 4.5
    buf = io.StringIO()
    write_t_csv(masked.t_values, buf)
    assert buf.getvalue().splitlines()[0] == "sample_index,t_value"


def test_cpa_report_json():
    report = cpa_campaign(500, False, LeakageConfig(2.0), 42)
    doc = json.loads(report.to_json())
    assert {"best_guess", "true_key_rank", "p_value", "min_traces_to_rank1", "verdict"} <= set(doc)
