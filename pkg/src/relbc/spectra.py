"""Single-photon spectral amplitudes and their quadrature discretization.

The bit carriers are normalized spectral wavefunctions psi(k) with compact
support on the positive wavenumber axis (c = 1, so wavenumber and angular
frequency coincide numerically).  Everything downstream (window operators,
POVMs, the protocol) works on states sampled onto a composite
Gauss-Legendre grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

SHAPES = ("rectangular", "truncated-gaussian", "raised-cosine")

# Truncated gaussian: support spans +-3 standard deviations.
_GAUSS_SUPPORT_SIGMAS = 3.0

# Node-count buckets for cached Gauss-Legendre rules.  The largest bucket
# covers oscillation phases up to delta*T ~ 1e4 across a single panel.
_NODE_BUCKETS = (256, 512, 1024, 1536, 2048, 3072, 4096, 5200)


@lru_cache(maxsize=32)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class SpectralAmplitude:
    """Normalized spectral wavefunction psi(k) with support (k_c - d/2, k_c + d/2).

    ``tau0`` multiplies the amplitude by exp(i*k*tau0), which shifts the
    time-domain profile by tau0 and leaves |psi(k)|^2 untouched.
    """

    shape: str
    k_c: float
    delta: float
    tau0: float = 0.0

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown shape {self.shape!r}, expected one of {SHAPES}")
        if self.delta <= 0:
            raise ValueError("bandwidth must be positive")
        if self.k_c - self.delta / 2 <= 0:
            raise ValueError(
                "support crosses k = 0: photon momenta must stay positive"
            )

    @property
    def support(self) -> tuple[float, float]:
        return (self.k_c - self.delta / 2, self.k_c + self.delta / 2)

    def delayed(self, tau0: float) -> "SpectralAmplitude":
        """Same amplitude with an extra spectral phase exp(i*k*tau0)."""
        return replace(self, tau0=self.tau0 + tau0)

    def __call__(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        x = k - self.k_c
        inside = np.abs(x) < self.delta / 2
        if self.shape == "rectangular":
            base = np.where(inside, 1.0 / math.sqrt(self.delta), 0.0)
        elif self.shape == "truncated-gaussian":
            sigma = self.delta / (2 * _GAUSS_SUPPORT_SIGMAS)
            # closed-form norm of exp(-x^2 / 2 sigma^2) truncated to +-3 sigma
            norm_sq = sigma * math.sqrt(math.pi) * math.erf(_GAUSS_SUPPORT_SIGMAS)
            base = np.where(
                inside, np.exp(-(x**2) / (2 * sigma**2)) / math.sqrt(norm_sq), 0.0
            )
        else:  # raised-cosine (Hann profile); int cos^4 = 3 delta / 8
            base = np.where(
                inside,
                np.cos(math.pi * x / self.delta) ** 2 / math.sqrt(3 * self.delta / 8),
                0.0,
            )
        if self.tau0 == 0.0:
            return base.astype(complex)
        return base * np.exp(1j * self.tau0 * k)

    def to_json(self) -> dict:
        return {
            "shape": self.shape,
            "k_c": self.k_c,
            "delta": self.delta,
            "tau0": self.tau0,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SpectralAmplitude":
        return cls(
            shape=obj["shape"],
            k_c=float(obj["k_c"]),
            delta=float(obj["delta"]),
            tau0=float(obj.get("tau0", 0.0)),
        )


def make_amplitude(
    shape: str, k_c: float, delta: float, tau0: float = 0.0
) -> SpectralAmplitude:
    """Construct a normalized amplitude; rejects unphysical parameters."""
    return SpectralAmplitude(shape=shape, k_c=k_c, delta=delta, tau0=tau0)


def disjoint_pair(
    k_1: float, k_2: float, delta: float, shape: str = "rectangular"
) -> tuple[SpectralAmplitude, SpectralAmplitude]:
    """Two equal-bandwidth amplitudes with disjoint supports.

    Requires |k_1 - k_2| >= delta; touching supports (equality) are fine
    since the intersection has measure zero.
    """
    if abs(k_1 - k_2) < delta:
        raise ValueError(
            "supports overlap: |k_1 - k_2| must be at least the bandwidth"
        )
    return (
        make_amplitude(shape, k_1, delta),
        make_amplitude(shape, k_2, delta),
    )


@dataclass(frozen=True)
class KGrid:
    """Composite Gauss-Legendre quadrature grid on [k_min, k_max]."""

    nodes: np.ndarray
    weights: np.ndarray
    k_min: float
    k_max: float

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise ValueError("nodes and weights must be matching 1-D arrays")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("grid nodes must be strictly increasing")
        if not np.all(weights > 0):
            raise ValueError("quadrature weights must be positive")
        span = self.k_max - self.k_min
        if abs(weights.sum() - span) > 1e-12 * max(span, 1.0):
            raise ValueError("weights do not integrate the constant 1 over the span")

    @property
    def size(self) -> int:
        return self.nodes.size


def gauss_legendre_grid(panels, nodes_per_panel) -> KGrid:
    """Composite GL grid from contiguous ascending panels [(a, b), ...].

    ``nodes_per_panel`` is an int or a per-panel sequence.
    """
    panels = [(float(a), float(b)) for a, b in panels]
    if not panels:
        raise ValueError("at least one panel required")
    for (a, b) in panels:
        if not b > a:
            raise ValueError("panel endpoints must be ascending")
    for (_, b), (a2, _) in zip(panels[:-1], panels[1:]):
        if abs(b - a2) > 1e-12 * max(abs(b), 1.0):
            raise ValueError("panels must be contiguous")
    if isinstance(nodes_per_panel, int):
        counts = [nodes_per_panel] * len(panels)
    else:
        counts = list(nodes_per_panel)
        if len(counts) != len(panels):
            raise ValueError("one node count per panel required")
    nodes, weights = [], []
    for (a, b), n in zip(panels, counts):
        x, w = _leggauss(int(n))
        half = 0.5 * (b - a)
        nodes.append(half * x + 0.5 * (a + b))
        weights.append(half * w)
    return KGrid(
        nodes=np.concatenate(nodes),
        weights=np.concatenate(weights),
        k_min=panels[0][0],
        k_max=panels[-1][1],
    )


def grid_from_spec(spec: dict) -> KGrid:
    """Reproduce a grid from {k_min, k_max, panels, nodes_per_panel}."""
    k_min = float(spec["k_min"])
    k_max = float(spec["k_max"])
    n_panels = int(spec["panels"])
    edges = np.linspace(k_min, k_max, n_panels + 1)
    return gauss_legendre_grid(
        list(zip(edges[:-1], edges[1:])), int(spec["nodes_per_panel"])
    )


def _bucketed_nodes(width: float, delta: float, T: float) -> int:
    # spacing <= delta/64 needs ~ 64*pi*width/delta interior GL nodes;
    # resolving the sin((k-k')T) oscillation needs ~ width*T/2 nodes.
    need = max(
        256,
        int(math.ceil(64 * math.pi * width / delta)) if width > delta else 256,
        int(math.ceil(width * T / 2)) + 80 if math.isfinite(T) else 256,
    )
    for n in _NODE_BUCKETS:
        if n >= need:
            return n
    return _NODE_BUCKETS[-1]


def grid_for_amplitudes(amplitudes, T: float = 0.0) -> KGrid:
    """Panelled grid covering every amplitude's support plus the gaps between.

    Panels align with support edges; node counts per panel grow with the
    window half-width T so the sinc kernel stays resolved.
    """
    supports = sorted(a.support for a in amplitudes)
    if not supports:
        raise ValueError("need at least one amplitude")
    delta_min = min(hi - lo for lo, hi in supports)
    edges = [supports[0][0]]
    for (lo, hi), nxt in zip(supports, supports[1:] + [None]):
        if edges[-1] < hi:
            edges.append(hi)
        if nxt is not None and nxt[0] > hi:
            edges.append(nxt[0])
        elif nxt is not None and nxt[0] < hi:
            raise ValueError("amplitude supports must not overlap")
    panels = list(zip(edges[:-1], edges[1:]))
    counts = [_bucketed_nodes(b - a, delta_min, T) for a, b in panels]
    return gauss_legendre_grid(panels, counts)


@dataclass(frozen=True)
class SampledState:
    """An amplitude evaluated on a grid and renormalized to unit quadrature norm."""

    grid: KGrid
    values: np.ndarray
    renorm: float = 1.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", values)
        if values.shape != self.grid.nodes.shape:
            raise ValueError("values must match the grid")
        norm = float(self.grid.weights @ np.abs(values) ** 2)
        if abs(norm - 1.0) > 1e-8:
            raise ValueError(f"state is not normalized: quadrature norm {norm}")

    def weighted(self) -> np.ndarray:
        """Coefficient vector sqrt(w_i) * v_i; unit 2-norm, the working basis."""
        return np.sqrt(self.grid.weights) * self.values


def sample(amplitude: SpectralAmplitude, grid: KGrid) -> SampledState:
    """Evaluate an amplitude on a grid, renormalize, and record the factor."""
    lo, hi = amplitude.support
    tol = 1e-12 * max(abs(lo), abs(hi), 1.0)
    if grid.k_min > lo + tol or grid.k_max < hi - tol:
        raise ValueError("grid does not cover the amplitude support")
    inside = grid.nodes[(grid.nodes > lo) & (grid.nodes < hi)]
    if inside.size < 2:
        raise ValueError("grid too coarse across the support")
    gaps = np.diff(np.concatenate(([lo], inside, [hi])))
    if gaps.max() > amplitude.delta / 64 + tol:
        raise ValueError("grid too coarse: node spacing must be <= delta/64")
    raw = amplitude(grid.nodes)
    norm = math.sqrt(float(grid.weights @ np.abs(raw) ** 2))
    if norm == 0.0:
        raise ValueError("amplitude vanishes on the grid")
    return SampledState(grid=grid, values=raw / norm, renorm=1.0 / norm)


def overlap(a: SampledState, b: SampledState) -> complex:
    """Quadrature inner product sum_i w_i a_i* b_i."""
    if a.grid is not b.grid and not (
        np.array_equal(a.grid.nodes, b.grid.nodes)
        and np.array_equal(a.grid.weights, b.grid.weights)
    ):
        raise ValueError("states live on different grids")
    return complex(np.sum(a.grid.weights * np.conj(a.values) * b.values))


def time_profile(state: SampledState, tau_nodes) -> np.ndarray:
    """Time-domain wavefunction psi(tau) under the unitary Fourier convention.

    psi(tau_j) = (1/sqrt(2*pi)) sum_i w_i v_i exp(-i k_i tau_j), so Parseval
    holds: the tau-integral of |psi|^2 over a wide enough range is 1.
    """
    tau = np.atleast_1d(np.asarray(tau_nodes, dtype=float))
    coeff = state.grid.weights * state.values
    phases = np.exp(-1j * np.outer(tau, state.grid.nodes))
    return (phases @ coeff) / math.sqrt(2 * math.pi)
