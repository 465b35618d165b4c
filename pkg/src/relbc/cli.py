"""Batch CLI: parameter sweeps, protocol Monte Carlo, attack studies, audits.

Subcommands: sweep | run | attack | validate.  Outputs are deterministic
CSV (with a '#'-prefixed metadata header) or JSON, reproducible from
(config, seed).  Exit codes: 0 ok, 1 usage, 2 invariant violation,
3 config error.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, attacks, measurement, oracle, protocol, window
from .spectra import SpectralAmplitude, grid_for_amplitudes, make_amplitude, sample

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2
EXIT_CONFIG = 3


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_config(path: str | None) -> dict:
    if path is None:
        raise ConfigError("--config is required for this subcommand")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top-level config must be an object")
    return cfg


def _require(cfg: dict, key: str, kind=float):
    if key not in cfg:
        raise ConfigError(f"missing config key {key!r}")
    try:
        return kind(cfg[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config key {key!r}: {exc}") from exc


def _config_hash(cfg: dict) -> str:
    return hashlib.sha256(
        json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def _header(seed, cfg: dict) -> list[str]:
    return [
        f"# relbc {__version__}",
        f"# seed: {seed}",
        f"# config-sha256: {_config_hash(cfg)}",
    ]


def _emit(out_path: str | None, text: str):
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text)


def _csv(header_lines, columns, rows) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(line + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    shapes = cfg.get("shapes", ["rectangular"])
    deltas = [float(d) for d in cfg.get("deltas", [1.0])]
    times = [float(t) for t in cfg.get("times", [0.0])]
    k_c = float(cfg.get("k_c", 10.0))
    rows = []
    for shape in shapes:
        for delta in deltas:
            amp = make_amplitude(shape, k_c * delta, delta)
            grid = grid_for_amplitudes([amp], T=max(times, default=0.0))
            state = sample(amp, grid)
            for t in sorted(times):
                w = window.build_window(grid, t)
                p = window.detect_prob(w, state)
                rows.append(
                    (delta, t, shape, p, 1.0 - p, measurement.effective_angle(p))
                )
    columns = ("delta", "T", "shape", "p_detect", "p_perp", "alpha_eff")
    if args.format == "json":
        payload = [dict(zip(columns, r)) for r in rows]
        _emit(args.out, json.dumps({"meta": {"seed": args.seed, "config_sha256": _config_hash(cfg)}, "rows": payload}, indent=2) + "\n")
    else:
        _emit(args.out, _csv(_header(args.seed, cfg), columns, rows))
    return EXIT_OK


def _protocol_config(cfg: dict, seed: int) -> protocol.CommitConfig:
    shape = cfg.get("shape", "rectangular")
    delta = _require(cfg, "delta")
    k1 = _require(cfg, "k1")
    k2 = _require(cfg, "k2")
    try:
        return protocol.CommitConfig(
            n_channels=_require(cfg, "n_channels", int),
            amp1=make_amplitude(shape, k1, delta),
            amp2=make_amplitude(shape, k2, delta),
            t_open=_require(cfg, "t_open"),
            t_probe=float(cfg.get("t_probe", 0.0)),
            povm_family=cfg.get("family", "state"),
            seed=seed,
            channel_delay=float(cfg.get("channel_delay", 0.0)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _strategy(cfg: dict) -> attacks.Strategy:
    kind = cfg.get("adversary", "honest")
    try:
        if kind == "wrong_state":
            amp = SpectralAmplitude.from_json(cfg["wrong_state"])
            return attacks.Strategy(kind=kind, amplitude=amp)
        return attacks.Strategy(
            kind=kind,
            tau0=float(cfg.get("tau0", 0.0)),
            t_probe=float(cfg.get("t_probe", 0.0)),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad adversary spec: {exc}") from exc


def cmd_run(args) -> int:
    cfg = _load_config(args.config)
    config = _protocol_config(cfg, args.seed)
    strategy = _strategy(cfg)
    ctx = protocol.ProtocolContext(config)
    if strategy.kind not in ("honest", "early_measure"):
        sent_by_bit = {
            b: attacks.transmitted_state(strategy, b, ctx) for b in (0, 1)
        }
    transcripts = []
    for i in range(args.runs):
        rng = np.random.default_rng([config.seed, i])
        bit = int(cfg.get("bit", 0))
        record, states = protocol.commit(config, bit, rng, ctx)
        if strategy.kind not in ("honest", "early_measure"):
            states = [sent_by_bit[b] for b in record.channel_bits]
        t = protocol.run_protocol(
            config, bit, rng=rng, ctx=ctx, transmitted=states, record=record
        )
        transcripts.append(t)
    if args.format == "json":
        if args.out is None:
            for t in transcripts:
                sys.stdout.write(json.dumps(t.to_json(), sort_keys=True) + "\n")
        else:
            outdir = Path(args.out)
            outdir.mkdir(parents=True, exist_ok=True)
            for i, t in enumerate(transcripts):
                (outdir / f"run_{i:05d}.json").write_text(
                    json.dumps(t.to_json(), sort_keys=True, indent=2) + "\n"
                )
        return EXIT_OK
    columns = (
        "seed", "run", "N", "T_probe", "T_open", "family", "adversary",
        "success", "aborted",
    )
    rows = [
        (
            config.seed, i, config.n_channels, config.t_probe, config.t_open,
            config.povm_family, strategy.kind,
            int(t.verdict == protocol.ACCEPT), int(t.verdict == protocol.ABORT),
        )
        for i, t in enumerate(transcripts)
    ]
    _emit(args.out, _csv(_header(args.seed, cfg), columns, rows))
    return EXIT_OK


def cmd_attack(args) -> int:
    cfg = _load_config(args.config)
    config = _protocol_config(cfg, args.seed)
    strategy = _strategy(cfg)
    ctx = protocol.ProtocolContext(config)
    times = [float(t) for t in cfg.get("times", [config.t_open])]
    family = config.povm_family
    rows = []
    for t in sorted(times):
        q = attacks.per_channel_flag_prob(strategy, ctx, family, t)
        det = attacks.cheat_detection_prob(strategy, config.n_channels, ctx, family, t)
        p_ind, p_coll, p_guess = attacks.early_binding_advantage(
            config, min(config.t_probe, t), ctx
        )
        param = strategy.tau0 if strategy.kind == "delayed" else strategy.t_probe
        rows.append(
            (strategy.kind, param, config.n_channels, t, q, det, p_ind, p_coll, p_guess)
        )
    columns = (
        "strategy", "param", "N", "T", "q", "detection_prob",
        "P_ind", "P_coll", "P_guess",
    )
    _emit(args.out, _csv(_header(args.seed, cfg), columns, rows))
    return EXIT_OK


def cmd_validate(args) -> int:
    lines = [f"# relbc {__version__} validate"]
    failures = 0
    amp1, amp2 = make_amplitude("rectangular", 12.0, 1.0), make_amplitude(
        "rectangular", 10.0, 1.0
    )
    grid = grid_for_amplitudes([amp1, amp2], T=10.0)
    psi1, psi2 = sample(amp1, grid), sample(amp2, grid)
    for family in ("support", "state"):
        for T in (0.1, 1.0, 10.0):
            if family == "support":
                povm = measurement.support_povm(grid, amp1.support, amp2.support, T)
            else:
                povm = measurement.state_povm(psi1, psi2, T)
            if args.inject_corruption:
                povm.m1[0, -1] = -povm.m1[0, -1] - 0.5
            report = oracle.povm_validity_bruteforce(povm)
            ok = report["passed"]
            failures += not ok
            lines.append(
                f"povm family={family} T={T}: min_eig={report['min_eigenvalue']:.3e} "
                f"residual={report['completeness_residual']:.3e} "
                f"{'ok' if ok else 'FAIL'}"
            )
    for shape in ("rectangular", "truncated-gaussian", "raised-cosine"):
        amp = make_amplitude(shape, 10.0, 1.0)
        for T in (0.1, 1.0, 10.0):
            g = grid_for_amplitudes([amp], T=T)
            p_kernel = window.detect_prob(window.build_window(g, T), sample(amp, g))
            p_time = oracle.detect_prob_time_domain(amp, T)
            rel = abs(p_kernel - p_time) / max(p_time, 1e-30)
            ok = rel < 1e-6
            failures += not ok
            lines.append(
                f"oracle shape={shape} T={T}: kernel={p_kernel:.9f} "
                f"time={p_time:.9f} rel={rel:.2e} {'ok' if ok else 'FAIL'}"
            )
    for T in (0.5, 2.0, 20.0):
        amp = make_amplitude("rectangular", 10.0, 1.0)
        g = grid_for_amplitudes([amp], T=T)
        p_kernel = window.detect_prob(window.build_window(g, T), sample(amp, g))
        p_closed = oracle.detect_prob_flat_closed_form(1.0, T)
        ok = abs(p_kernel - p_closed) < 1e-8
        failures += not ok
        lines.append(
            f"closed-form T={T}: kernel={p_kernel:.12f} closed={p_closed:.12f} "
            f"{'ok' if ok else 'FAIL'}"
        )
    lines.append(f"failures: {failures}")
    _emit(args.out, "\n".join(lines) + "\n")
    return EXIT_OK if failures == 0 else EXIT_INVARIANT


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="path to a JSON config file")
    p.add_argument("--seed", type=int, default=0, help="master RNG seed")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=1, help="parallel tasks (advisory)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="relbc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, doc in (
        ("sweep", cmd_sweep, "detection-probability sweep over (shape, delta, T)"),
        ("run", cmd_run, "Monte Carlo protocol runs"),
        ("attack", cmd_attack, "cheating-strategy study"),
        ("validate", cmd_validate, "POVM validity and oracle agreement audit"),
    ):
        p = sub.add_parser(name, help=doc)
        _add_common(p)
        p.set_defaults(func=fn)
        if name == "run":
            p.add_argument("--runs", type=int, default=1)
        if name == "validate":
            p.add_argument("--inject-corruption", action="store_true",
                           help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
