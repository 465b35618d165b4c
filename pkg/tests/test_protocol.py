import math

import numpy as np
import pytest

from relbc.measurement import PERP
from relbc.protocol import (
    ABORT,
    ACCEPT,
    INCONCLUSIVE,
    CommitConfig,
    CommitRecord,
    ProtocolContext,
    commit,
    guess_success,
    ident_prob_collective,
    ident_prob_individual,
    measure_all,
    open_and_verify,
    run_many,
    run_protocol,
    simulate_identification,
    storage_security_curve,
)
from relbc.spectra import disjoint_pair


@pytest.fixture(scope="module")
def config():
    amp1, amp2 = disjoint_pair(12.0, 10.0, 1.0)
    return CommitConfig(
        n_channels=3, amp1=amp1, amp2=amp2, t_open=50.0, seed=7,
    )


@pytest.fixture(scope="module")
def ctx(config):
    return ProtocolContext(config)


def test_config_rejects_overlapping_carriers():
    amp1, amp2 = disjoint_pair(12.0, 10.0, 1.0)
    bad = amp1.delayed(0.0)  # same object semantics, shifted support below
    with pytest.raises(ValueError, match="disjoint"):
        CommitConfig(n_channels=2, amp1=amp1, amp2=amp1, t_open=10.0)
    with pytest.raises(ValueError, match="probe"):
        CommitConfig(n_channels=2, amp1=amp1, amp2=amp2, t_open=10.0, t_probe=10.0)
    with pytest.raises(ValueError, match="channel"):
        CommitConfig(n_channels=0, amp1=amp1, amp2=amp2, t_open=10.0)
    del bad


def test_record_parity_invariant():
    CommitRecord(bit=1, channel_bits=(1, 0, 0))
    with pytest.raises(ValueError, match="parity"):
        CommitRecord(bit=0, channel_bits=(1, 0, 0))
    with pytest.raises(ValueError, match="0 or 1"):
        CommitRecord(bit=0, channel_bits=(2, 0))


def test_commit_parity_always_matches(config, ctx):
    rng = np.random.default_rng(0)
    for bit in (0, 1):
        for _ in range(50):
            record, states = commit(config, bit, rng, ctx)
            assert record.bit == bit
            assert len(states) == config.n_channels
            # each launched state is the carrier for its channel bit
            for b, s in zip(record.channel_bits, states):
                assert s is ctx.carrier(b)


def test_commit_single_channel(config, ctx):
    cfg = CommitConfig(
        n_channels=1, amp1=config.amp1, amp2=config.amp2, t_open=50.0,
    )
    rng = np.random.default_rng(1)
    record, _ = commit(cfg, 1, rng, ctx)
    assert record.channel_bits == (1,)


def test_commit_channel_bits_uniform(config, ctx):
    # with the parity fixed, each individual channel bit is still a fair coin
    rng = np.random.default_rng(3)
    runs = 4000
    counts = np.zeros(config.n_channels)
    for _ in range(runs):
        record, _ = commit(config, 1, rng, ctx)
        counts += record.channel_bits
    sigma = 0.5 * math.sqrt(runs)
    assert np.all(np.abs(counts - runs / 2) < 3 * sigma)


def test_measure_all_at_zero_time_is_silent(config, ctx):
    rng = np.random.default_rng(2)
    _, states = commit(config, 0, rng, ctx)
    outcomes = measure_all(states, 0.0, ctx, rng)
    assert outcomes == (PERP,) * config.n_channels


def test_measure_all_rejects_negative_time(config, ctx):
    rng = np.random.default_rng(2)
    _, states = commit(config, 0, rng, ctx)
    with pytest.raises(ValueError, match="non-negative"):
        measure_all(states, -1.0, ctx, rng)


def test_support_family_never_misfires(config, ctx):
    # honest disjoint-support carriers can never trip the wrong projector
    rng = np.random.default_rng(4)
    for _ in range(200):
        record, states = commit(config, 0, rng, ctx)
        outcomes = measure_all(states, config.t_open, ctx, rng, family="support")
        for b, o in zip(record.channel_bits, outcomes):
            assert o in (PERP, b + 1)


def test_open_and_verify_verdicts(config):
    claims = CommitRecord(bit=0, channel_bits=(0, 1, 1))
    assert open_and_verify(config, claims, (1, 2, 2), config.t_open) == ACCEPT
    assert open_and_verify(config, claims, (1, PERP, 2), config.t_open) == INCONCLUSIVE
    assert open_and_verify(config, claims, (2, 2, 2), config.t_open) == ABORT
    # abort wins even when other channels are silent
    assert open_and_verify(config, claims, (PERP, 1, PERP), config.t_open) == ABORT
    with pytest.raises(ValueError, match="t_open"):
        open_and_verify(config, claims, (1, 2, 2), config.t_open - 1.0)
    with pytest.raises(ValueError, match="per channel"):
        open_and_verify(config, claims, (1, 2), config.t_open)


def test_run_protocol_honest_never_aborts(config, ctx):
    for t in run_many(config, 100, bit=1, ctx=ctx):
        assert t.verdict in (ACCEPT, INCONCLUSIVE)
        assert t.claims is t.record


def test_run_protocol_deterministic(config, ctx):
    a = run_many(config, 5, bit=0, ctx=ctx)
    b = run_many(config, 5, bit=0, ctx=ctx)
    assert [t.to_json() for t in a] == [t.to_json() for t in b]
    # ... and distinct run indices do differ somewhere
    assert any(x.to_json() != y.to_json() for x, y in zip(a, a[1:]))


def test_run_protocol_fixed_record(config, ctx):
    record = CommitRecord(bit=1, channel_bits=(1, 1, 1))
    t = run_protocol(config, 1, np.random.default_rng(0), ctx, record=record)
    assert t.record is record
    with pytest.raises(ValueError, match="parity"):
        run_protocol(config, 0, np.random.default_rng(0), ctx, record=record)


def test_run_protocol_transmitted_length_check(config, ctx):
    with pytest.raises(ValueError, match="per channel"):
        run_protocol(config, 0, np.random.default_rng(0), ctx, transmitted=[ctx.psi1])


def test_ident_formulas():
    assert ident_prob_individual(0.5, 10) == pytest.approx(9.765625e-4, rel=1e-12)
    assert ident_prob_collective(0.5, 10) == pytest.approx(0.03125, rel=1e-12)
    assert guess_success(0.3, 4) == pytest.approx(0.50405, rel=1e-12)
    assert guess_success(1.0, 7) == 1.0
    assert guess_success(0.0, 7) == 0.5
    with pytest.raises(ValueError, match="probability"):
        ident_prob_individual(1.5, 2)


def test_collective_dominates_individual():
    for p in (0.05, 0.3, 0.7, 0.99):
        for n in (1, 2, 5, 20):
            assert ident_prob_collective(p, n) >= ident_prob_individual(p, n)


def test_simulate_identification_matches_formulas():
    rng = np.random.default_rng(11)
    runs = 200_000
    for p, n in ((0.3, 3), (0.5, 4), (0.9, 2)):
        f_all, f_guess = simulate_identification(p, n, runs, rng)
        for freq, expect in (
            (f_all, ident_prob_individual(p, n)),
            (f_guess, guess_success(p, n)),
        ):
            sigma = math.sqrt(expect * (1 - expect) / runs)
            assert abs(freq - expect) < 4 * sigma + 1e-12


def test_storage_security_curve(config):
    times = np.linspace(0.0, config.t_open, 12)
    curve = storage_security_curve(config, times)
    vals = [s for _, s in curve]
    assert vals[0] == pytest.approx(1.0, abs=1e-12)
    # monotone decline as the window opens
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0.2
    with pytest.raises(ValueError, match="t_open"):
        storage_security_curve(config, [config.t_open + 1.0])
