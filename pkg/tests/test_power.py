import io
import math

import numpy as np
import pytest

from cryptrisc.crypto_isa import CryptoOp
from cryptrisc.pipeline import PowerEvent
from cryptrisc.power import (
    FIXED,
    RANDOM,
    LeakageConfig,
    NoiseStream,
    instruction_window,
    leak,
    shuffled_groups,
    synthesize_traces,
    word_to_unit,
    write_traces_csv,
)

QUIET = LeakageConfig(sigma=0.0)


def test_leak_examples():
    assert leak(PowerEvent(0, 0, 0, 0, 0), QUIET) == 0.0
    assert leak(PowerEvent(0, 0xFF, 0, 0, 0), LeakageConfig(0.0, "hw")) == 8.0
    # Hamming distance to the previous destination value
    assert leak(PowerEvent(0, 0, 0, 0b1010, 0b0110), QUIET) == 2 + 2
    assert leak(PowerEvent(0, 1, 0, 0, 0, aux=(3, 7)), LeakageConfig(0.0, "hw")) == 1 + 2 + 3


def test_noise_mean_converges():
    ev = PowerEvent(0, 0xFFFF, 0xF, 0x3, 0)
    clean = leak(ev, LeakageConfig(0.0, "hw"))
    cfg = LeakageConfig(2.0, "hw")
    noise = NoiseStream(99)
    n = 100_000
    samples = np.array([leak(ev, cfg, noise) for _ in range(n)])
    assert abs(samples.mean() - clean) < 3 * 2 / math.sqrt(n)
    assert abs(samples.std() - 2.0) < 0.03


def test_noise_stream_replay_and_unit_range():
    a, b = NoiseStream(5), NoiseStream(5)
    assert [a.gauss() for _ in range(9)] == [b.gauss() for _ in range(9)]
    assert word_to_unit(0) == 2.0**-53
    assert word_to_unit(2**64 - 1) == 1.0


def test_config_validation():
    with pytest.raises(ValueError):
        LeakageConfig(sigma=-1)
    with pytest.raises(ValueError):
        LeakageConfig(model="hd")
    with pytest.raises(ValueError):
        leak(PowerEvent(0, 0, 0, 0, 0), LeakageConfig(1.0))


def test_group_split_and_shuffle():
    labels = shuffled_groups(4000, 42)
    assert labels.count(FIXED) == labels.count(RANDOM) == 2000
    assert labels == shuffled_groups(4000, 42)
    assert labels != shuffled_groups(4000, 43)
    assert labels[:20] != [FIXED] * 20
    with pytest.raises(ValueError):
        shuffled_groups(5, 1)


def test_window_shape():
    win = instruction_window(CryptoOp.SHA256_SIG0)
    assert len(win) == 4 and win[0].rs2 == 0
    assert instruction_window(CryptoOp.AES64_KS1)[0].imm == 0


def test_noiseless_unmasked_fixed_traces_replay():
    traces = synthesize_traces(CryptoOp.AES64_ENCS, None, 40, False, QUIET, 7)
    fixed = [t.samples for t in traces if t.group == FIXED]
    assert all(np.array_equal(fixed[0], f) for f in fixed)
    again = synthesize_traces(CryptoOp.AES64_ENCS, None, 40, False, QUIET, 7)
    assert all(np.array_equal(a.samples, b.samples) for a, b in zip(traces, again))


def test_masked_fixed_traces_differ():
    traces = synthesize_traces(CryptoOp.AES64_ENCS, None, 40, True, QUIET, 7)
    fixed = [t.samples for t in traces if t.group == FIXED]
    assert not np.array_equal(fixed[0], fixed[1])
    assert [t.seed for t in traces] == [7 ^ i for i in range(40)]


def test_traces_csv():
    traces = synthesize_traces(CryptoOp.SM3_P0, None, 4, False, QUIET, 1)
    buf = io.StringIO()
    write_traces_csv(traces, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "group,seed,s0,s1,s2,s3"
    assert len(lines) == 5
