"""Cheating strategies and their detection probabilities.

Sender-side strategies replace the honest carriers: a delayed launch is
exactly a spectral phase exp(i*k*tau0); a mixed sender ships the same
half/half mixture on every channel; a wrong-state sender ships an arbitrary
normalized amplitude.  The receiver-side adversary measures early and is
credited the analytic collective bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import measurement, protocol, window
from .spectra import SpectralAmplitude, grid_for_amplitudes, sample

KINDS = ("honest", "delayed", "mixed", "wrong_state", "early_measure")


@dataclass(frozen=True)
class Strategy:
    kind: str
    tau0: float = 0.0
    amplitude: SpectralAmplitude | None = None
    t_probe: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.tau0 < 0:
            raise ValueError("delay must be non-negative")
        if self.kind == "wrong_state" and self.amplitude is None:
            raise ValueError("wrong_state strategy needs an amplitude")


HONEST = Strategy(kind="honest")


def transmitted_state(strategy: Strategy, claimed_bit: int, ctx: protocol.ProtocolContext):
    """What actually enters the channel when A claims ``claimed_bit``.

    Returns a SampledState, or a density matrix for the mixed strategy.
    """
    if claimed_bit not in (0, 1):
        raise ValueError("claimed bit must be 0 or 1")
    if strategy.kind in ("honest", "early_measure"):
        return ctx.carrier(claimed_bit)
    if strategy.kind == "delayed":
        amp = (ctx.config.amp1 if claimed_bit == 0 else ctx.config.amp2).delayed(
            strategy.tau0
        )
        return sample(amp, ctx.grid)
    if strategy.kind == "mixed":
        return measurement.mixed_density([ctx.psi1, ctx.psi2])
    return sample(strategy.amplitude, ctx.grid)


def per_channel_flag_prob(
    strategy: Strategy,
    ctx: protocol.ProtocolContext,
    family: str,
    T: float,
    claimed_bit: int = 0,
) -> float:
    """Probability that one channel contradicts the claim A will open.

    Support family: only a definite wrong outcome flags (silence never
    contradicts a claim).  State family: verification demands confirmation,
    so anything but the claimed outcome flags, q = 1 - p_claimed.
    """
    if T < 0:
        raise ValueError("window parameter must be non-negative")
    sent = transmitted_state(strategy, claimed_bit, ctx)
    dist = measurement.outcome_dist(ctx.povm(T, family), sent)
    p_claimed, p_wrong = (
        (dist.p1, dist.p2) if claimed_bit == 0 else (dist.p2, dist.p1)
    )
    if family == "support":
        return p_wrong
    return 1.0 - p_claimed


def cheat_detection_prob(
    strategy: Strategy,
    n_channels: int,
    ctx: protocol.ProtocolContext,
    family: str,
    T: float,
) -> float:
    """Probability at least one of N channels flags: 1 - (1 - q)^N."""
    q = per_channel_flag_prob(strategy, ctx, family, T)
    return 1.0 - (1.0 - q) ** n_channels


def monte_carlo_detection_rate(
    strategy: Strategy,
    n_channels: int,
    ctx: protocol.ProtocolContext,
    family: str,
    T: float,
    runs: int,
    seed: int = 0,
) -> float:
    """Sampled counterpart of cheat_detection_prob over seeded runs."""
    povm = ctx.povm(T, family)
    dists = {
        b: measurement.outcome_dist(povm, transmitted_state(strategy, b, ctx))
        for b in (0, 1)
    }
    flagged = 0
    for i in range(runs):
        rng = np.random.default_rng([seed, i])
        claims = rng.integers(0, 2, size=n_channels)
        hit = False
        for b in claims:
            o = measurement.sample_outcome(dists[int(b)], rng)
            if family == "support":
                hit = o != measurement.PERP and o != b + 1
            else:
                hit = o != b + 1
            if hit:
                break
        flagged += hit
    return flagged / runs


def early_binding_advantage(
    config: protocol.CommitConfig,
    t_probe: float,
    ctx: protocol.ProtocolContext | None = None,
) -> tuple[float, float, float]:
    """B's parity-identification success from measuring at t_probe.

    Returns (individual p^N, collective p^(N/2), guess-augmented) with
    p = detect probability of a carrier inside the window (-t_probe, t_probe).
    """
    if not 0.0 <= t_probe < config.t_open:
        raise ValueError("probe time must lie in [0, t_open)")
    ctx = ctx or protocol.ProtocolContext(config)
    w = window.build_window(ctx.grid, t_probe)
    p = window.detect_prob(w, ctx.psi1)
    n = config.n_channels
    return (
        protocol.ident_prob_individual(p, n),
        protocol.ident_prob_collective(p, n),
        protocol.guess_success(p, n),
    )


def required_bandwidth(
    epsilon: float,
    t_c: float,
    n_channels: int,
    shape: str = "rectangular",
    max_iter: int = 60,
) -> float:
    """Bandwidth making the collective attack epsilon-harmless up to t_c.

    Solves p(t_c)^(N/2) <= 2*epsilon for the largest compliant delta by
    bisection against the kernel-matrix detect probability; the returned
    bandwidth satisfies the bound by construction (the bracket's low end).
    """
    if not 0.0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 1/2)")
    if t_c <= 0:
        raise ValueError("storage time must be positive")
    target = (2.0 * epsilon) ** (2.0 / n_channels)

    def p_of(delta: float) -> float:
        amp = SpectralAmplitude(shape=shape, k_c=delta, delta=delta)
        grid = grid_for_amplitudes([amp], T=t_c)
        return window.detect_prob(window.build_window(grid, t_c), sample(amp, grid))

    lo = 1e-6 / t_c
    hi = 2.0 / t_c
    while p_of(hi) < target:
        hi *= 2.0
        if hi * t_c > 1e6:
            raise ValueError("no bandwidth reaches the target probability")
    if p_of(lo) > target:
        raise ValueError("epsilon too small for the bisection bracket")
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)
        if p_of(mid) <= target:
            lo = mid
        else:
            hi = mid
    return lo
