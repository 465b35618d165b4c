"""Relativistic quantum bit-commitment simulator.

One-dimensional photon wavepackets, windowed three-outcome POVMs, and the
N-channel parity-bit commitment protocol with honest and adversarial
senders.
"""

__version__ = "0.1.0"

from .spectra import (
    KGrid,
    SampledState,
    SpectralAmplitude,
    disjoint_pair,
    gauss_legendre_grid,
    grid_for_amplitudes,
    grid_from_spec,
    make_amplitude,
    overlap,
    sample,
    time_profile,
)
from .window import (
    WindowOperator,
    build_offset_window,
    build_window,
    detect_prob,
    perp_prob,
    window_spectrum,
)
from .measurement import (
    PERP,
    OutcomeDist,
    Povm,
    effective_angle,
    mixed_density,
    outcome_dist,
    pure_density,
    sample_outcome,
    state_povm,
    support_povm,
)
from .protocol import (
    ACCEPT,
    ABORT,
    INCONCLUSIVE,
    CommitConfig,
    CommitRecord,
    CommitTranscript,
    ProtocolContext,
    commit,
    guess_success,
    ident_prob_collective,
    ident_prob_individual,
    open_and_verify,
    run_many,
    run_protocol,
    storage_security_curve,
)
from .attacks import (
    HONEST,
    Strategy,
    cheat_detection_prob,
    early_binding_advantage,
    per_channel_flag_prob,
    required_bandwidth,
    transmitted_state,
)
