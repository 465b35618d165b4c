"""Time-window (concentration) operator with the sinc kernel.

W_T has kernel sin((k - k')T) / (pi (k - k')), the unique normalization for
which 0 <= W_T <= I and W_T -> I as T -> infinity.  Its quadratic form on a
normalized state is the detection probability inside the window (-T, T):
the fraction of the wavepacket's energy the apparatus has causal access to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectra import KGrid, SampledState

_EIG_SLACK = 1e-9


@dataclass(frozen=True)
class WindowOperator:
    """Discretized window operator in the weighted (sqrt(w)-scaled) basis."""

    grid: KGrid
    T: float
    center: float = 0.0
    matrix: np.ndarray = None

    def __post_init__(self):
        if self.matrix is None:
            raise ValueError("matrix must be supplied; use build_window")
        m = np.asarray(self.matrix)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def _sinc_kernel(k: np.ndarray, T: float) -> np.ndarray:
    dk = np.subtract.outer(k, k)
    with np.errstate(divide="ignore", invalid="ignore"):
        kern = np.sin(dk * T) / (math.pi * dk)
    # removable singularity on the diagonal
    np.fill_diagonal(kern, T / math.pi)
    return kern


def build_window(grid: KGrid, T: float) -> WindowOperator:
    """Symmetric window (-T, T); T = inf gives the identity (full access)."""
    if T < 0:
        raise ValueError("window half-width must be non-negative")
    if math.isinf(T):
        return WindowOperator(grid=grid, T=T, matrix=np.eye(grid.size))
    sw = np.sqrt(grid.weights)
    kern = _sinc_kernel(grid.nodes, T) * np.outer(sw, sw)
    return WindowOperator(grid=grid, T=T, matrix=kern)


def build_offset_window(grid: KGrid, tau_a: float, tau_b: float) -> WindowOperator:
    """Window over (tau_a, tau_b); needed when a packet is not centered at 0.

    The kernel picks up the phase exp(i (k - k') (tau_a + tau_b)/2) relative
    to the symmetric window of half-width (tau_b - tau_a)/2.
    """
    if tau_b < tau_a:
        raise ValueError("window endpoints must be ordered")
    half = 0.5 * (tau_b - tau_a)
    center = 0.5 * (tau_a + tau_b)
    sw = np.sqrt(grid.weights)
    kern = _sinc_kernel(grid.nodes, half) * np.outer(sw, sw)
    if center != 0.0:
        dk = np.subtract.outer(grid.nodes, grid.nodes)
        kern = kern * np.exp(1j * dk * center)
    return WindowOperator(grid=grid, T=half, center=center, matrix=kern)


def _check_grid(w: WindowOperator, state: SampledState):
    if state.grid is not w.grid and not np.array_equal(
        state.grid.nodes, w.grid.nodes
    ):
        raise ValueError("state and window live on different grids")


def detect_prob(w: WindowOperator, state: SampledState) -> float:
    """<psi| W_T |psi>: probability of detection inside the window."""
    _check_grid(w, state)
    u = state.weighted()
    p = float(np.real(np.vdot(u, w.matrix @ u)))
    if p < -_EIG_SLACK:
        raise ValueError(f"quadratic form returned {p}: window operator is broken")
    if p > 1.0 + 1e-6:
        raise ValueError(f"quadratic form returned {p} > 1")
    return min(max(p, 0.0), 1.0)


def perp_prob(w: WindowOperator, state: SampledState) -> float:
    """Probability of the inconclusive outcome: 1 - detect_prob."""
    return 1.0 - detect_prob(w, state)


def window_spectrum(w: WindowOperator) -> np.ndarray:
    """Eigenvalues of W_T, descending; concentration eigenvalues in [0, 1]."""
    vals = np.linalg.eigvalsh(w.matrix)[::-1]
    if vals.size and (vals[-1] < -_EIG_SLACK or vals[0] > 1.0 + _EIG_SLACK):
        raise ValueError(
            f"window spectrum escapes [0, 1]: [{vals[-1]}, {vals[0]}]"
        )
    return vals
