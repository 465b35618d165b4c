"""N-channel parity-bit commitment protocol.

A commits a bit as the parity of N channel bits, launching one wavepacket
per channel at t = 0.  B measures each channel with a three-outcome POVM
whose window parameter grows with elapsed time; before the horizon the
carriers are effectively non-orthogonal, so B cannot identify the parity,
while A cannot change it after launch.  After the horizon A opens the
channel bits and B cross-checks them against his definite outcomes.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import measurement, window
from .spectra import KGrid, SampledState, SpectralAmplitude, grid_for_amplitudes, sample

ACCEPT = "accept"
ABORT = "abort"
INCONCLUSIVE = "inconclusive"

FAMILIES = ("support", "state")


@dataclass(frozen=True)
class CommitConfig:
    n_channels: int
    amp1: SpectralAmplitude
    amp2: SpectralAmplitude
    t_open: float
    t_probe: float = 0.0
    povm_family: str = "state"
    seed: int = 0
    # constant launch-time offset for a non-zero channel length; the
    # idealized protocol sets the channel length to zero
    channel_delay: float = 0.0

    def __post_init__(self):
        if self.n_channels < 1:
            raise ValueError("need at least one channel")
        if not 0.0 <= self.t_probe < self.t_open:
            raise ValueError("probe time must satisfy 0 <= t_probe < t_open")
        if self.povm_family not in FAMILIES:
            raise ValueError(f"unknown POVM family {self.povm_family!r}")
        lo1, hi1 = self.amp1.support
        lo2, hi2 = self.amp2.support
        if max(lo1, lo2) < min(hi1, hi2):
            raise ValueError("carrier supports must be disjoint")


@dataclass(frozen=True)
class CommitRecord:
    bit: int
    channel_bits: tuple[int, ...]

    def __post_init__(self):
        if self.bit not in (0, 1) or any(b not in (0, 1) for b in self.channel_bits):
            raise ValueError("bits must be 0 or 1")
        parity = functools.reduce(lambda a, b: a ^ b, self.channel_bits)
        if parity != self.bit:
            raise ValueError("channel bits do not have the committed parity")


@dataclass(frozen=True)
class CommitTranscript:
    config: CommitConfig
    record: CommitRecord
    outcomes: tuple[int, ...]
    measure_time: float
    claims: CommitRecord
    verdict: str

    def to_json(self) -> dict:
        return {
            "n_channels": self.config.n_channels,
            "family": self.config.povm_family,
            "seed": self.config.seed,
            "t_open": self.config.t_open,
            "bit": self.record.bit,
            "channel_bits": list(self.record.channel_bits),
            "outcomes": list(self.outcomes),
            "measure_time": self.measure_time,
            "claimed_bit": self.claims.bit,
            "claimed_channel_bits": list(self.claims.channel_bits),
            "verdict": self.verdict,
        }


class ProtocolContext:
    """Grid, reference states and POVM cache shared across runs of one config."""

    def __init__(self, config: CommitConfig):
        self.config = config
        self.grid: KGrid = grid_for_amplitudes(
            [config.amp1, config.amp2], T=config.t_open
        )
        self.psi1: SampledState = sample(config.amp1, self.grid)
        self.psi2: SampledState = sample(config.amp2, self.grid)
        self._povms: dict[tuple[str, float], measurement.Povm] = {}

    def povm(self, t: float, family: str | None = None) -> measurement.Povm:
        family = family or self.config.povm_family
        key = (family, t)
        if key not in self._povms:
            if family == "support":
                self._povms[key] = measurement.support_povm(
                    self.grid, self.config.amp1.support, self.config.amp2.support, t
                )
            else:
                self._povms[key] = measurement.state_povm(self.psi1, self.psi2, t)
        return self._povms[key]

    def carrier(self, channel_bit: int) -> SampledState:
        return self.psi1 if channel_bit == 0 else self.psi2


def commit(
    config: CommitConfig, bit: int, rng: np.random.Generator, ctx: ProtocolContext | None = None
) -> tuple[CommitRecord, list[SampledState]]:
    """A's commit move: random channel bits with the committed parity.

    Returns the record A keeps plus the carrier states launched to B
    (all at t = 0; a non-zero channel_delay only shifts the clock).
    """
    ctx = ctx or ProtocolContext(config)
    n = config.n_channels
    head = [int(b) for b in rng.integers(0, 2, size=n - 1)]
    parity = functools.reduce(lambda a, b: a ^ b, head, 0)
    channel_bits = tuple(head + [parity ^ int(bit)])
    record = CommitRecord(bit=int(bit), channel_bits=channel_bits)
    states = [ctx.carrier(b) for b in channel_bits]
    return record, states


def measure_all(
    states,
    t: float,
    ctx: ProtocolContext,
    rng: np.random.Generator,
    family: str | None = None,
) -> tuple[int, ...]:
    """B measures every channel independently with the window parameter t."""
    if t < 0:
        raise ValueError("measurement time must be non-negative")
    povm = ctx.povm(max(t - ctx.config.channel_delay, 0.0), family)
    dist_cache: dict[int, measurement.OutcomeDist] = {}
    outcomes = []
    for s in states:
        key = id(s)
        if key not in dist_cache:
            dist_cache[key] = measurement.outcome_dist(povm, s)
        outcomes.append(measurement.sample_outcome(dist_cache[key], rng))
    return tuple(outcomes)


def open_and_verify(
    config: CommitConfig,
    claims: CommitRecord,
    outcomes,
    open_time: float,
) -> str:
    """B's verdict once A has opened.

    abort: some definite outcome contradicts the opened channel bit.
    accept: every channel gave a definite, matching outcome.
    inconclusive: no contradiction, but some channel stayed silent.
    Opening before the agreed horizon is a protocol-order violation.
    """
    if open_time < config.t_open:
        raise ValueError("opening before t_open violates the protocol order")
    if len(claims.channel_bits) != len(outcomes):
        raise ValueError("one claim per channel required")
    definite_match = True
    for claimed_bit, outcome in zip(claims.channel_bits, outcomes):
        if outcome == measurement.PERP:
            definite_match = False
        elif outcome != claimed_bit + 1:
            return ABORT
    return ACCEPT if definite_match else INCONCLUSIVE


def run_protocol(
    config: CommitConfig,
    bit: int,
    rng: np.random.Generator | None = None,
    ctx: ProtocolContext | None = None,
    transmitted: list | None = None,
    open_time: float | None = None,
    record: CommitRecord | None = None,
) -> CommitTranscript:
    """One full commit / measure / open / verify round.

    ``transmitted`` overrides the honest carriers (adversarial senders);
    ``record`` skips the commit draw when the channel bits were fixed
    upstream.  A's opened claims are always the committed record.
    """
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    ctx = ctx or ProtocolContext(config)
    open_time = config.t_open if open_time is None else open_time
    if record is None:
        record, states = commit(config, bit, rng, ctx)
    else:
        if record.bit != bit:
            raise ValueError("record parity does not match the committed bit")
        states = [ctx.carrier(b) for b in record.channel_bits]
    if transmitted is not None:
        if len(transmitted) != config.n_channels:
            raise ValueError("one transmitted state per channel required")
        states = transmitted
    povm = ctx.povm(max(open_time - config.channel_delay, 0.0))
    outcomes = []
    dist_cache: dict[int, measurement.OutcomeDist] = {}
    for s in states:
        key = id(s)
        if key not in dist_cache:
            dist_cache[key] = measurement.outcome_dist(povm, s)
        outcomes.append(measurement.sample_outcome(dist_cache[key], rng))
    outcomes = tuple(outcomes)
    verdict = open_and_verify(config, record, outcomes, open_time)
    return CommitTranscript(
        config=config,
        record=record,
        outcomes=outcomes,
        measure_time=open_time,
        claims=record,
        verdict=verdict,
    )


def run_many(
    config: CommitConfig,
    runs: int,
    bit: int = 0,
    ctx: ProtocolContext | None = None,
) -> list[CommitTranscript]:
    """Independent seeded runs; run i uses the stream (seed, i)."""
    ctx = ctx or ProtocolContext(config)
    out = []
    for i in range(runs):
        rng = np.random.default_rng([config.seed, i])
        out.append(run_protocol(config, bit, rng=rng, ctx=ctx))
    return out


def ident_prob_individual(p: float, n_channels: int) -> float:
    """All N channels identified under per-channel measurements: p^N."""
    _check_p(p)
    return p**n_channels


def ident_prob_collective(p: float, n_channels: int) -> float:
    """Credited success of a joint measurement on all N carriers: p^(N/2)."""
    _check_p(p)
    return p ** (n_channels / 2)


def guess_success(p: float, n_channels: int) -> float:
    """Parity-identification probability with a fair-coin fallback.

    B learns the parity when every channel fires (p^N) and guesses it
    otherwise: p^N + (1 - p^N)/2.
    """
    _check_p(p)
    q = p**n_channels
    return q + (1.0 - q) / 2.0


def simulate_identification(
    p: float, n_channels: int, runs: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Monte Carlo frequencies of (all channels fired, parity guessed right)."""
    _check_p(p)
    fired = rng.random((runs, n_channels)) < p
    all_fired = fired.all(axis=1)
    success = np.where(all_fired, True, rng.random(runs) < 0.5)
    return float(all_fired.mean()), float(success.mean())


def storage_security_curve(config: CommitConfig, times) -> list[tuple[float, float]]:
    """Secure-storage probability P_store(t), from 1 (t = 0) down to 0.

    The adversary B is credited max(collective, guessing) success; the
    advantage over a fair coin is rescaled so success 1/2 maps to security 1
    and success 1 maps to security 0.
    """
    times = [float(t) for t in times]
    if any(t < 0 or t > config.t_open for t in times):
        raise ValueError("times must lie within [0, t_open]")
    ctx = ProtocolContext(config)
    curve = []
    for t in times:
        w = window.build_window(ctx.grid, t)
        p = window.detect_prob(w, ctx.psi1)
        best = max(
            ident_prob_collective(p, config.n_channels),
            guess_success(p, config.n_channels),
        )
        curve.append((t, 1.0 - 2.0 * (best - 0.5)))
    return curve


def _check_p(p: float):
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be a probability")
