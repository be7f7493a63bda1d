"""Non-Markovian qubit dynamics with quantized torus-map environments."""

from nmtorus.errors import DimensionMismatchError, SizeGuardError, ValidationError
from nmtorus.torus import (
    KickPhase,
    KickedMap,
    TorusState,
    apply_map,
    build_dense,
    to_momentum,
    to_position,
)
from nmtorus.maps import (
    HarperParams,
    MapPair,
    PcmParams,
    coupling_from_hbar_units,
    ehrenfest_time,
    harper_pair,
    hbar,
    pcm_lyapunov,
    pcm_pair,
)
from nmtorus.echo import (
    EchoSeries,
    afa_series,
    echo_amplitude_pure,
    fit_decay_rate,
    saturation_stats,
)
from nmtorus.nonmarkov import (
    NmSeries,
    PauliTransferMatrix,
    QubitState,
    channel_from_afa,
    channel_oracle,
    nm_series,
    positive_variation,
    trace_distance,
    verify_optimal_pair,
)

__version__ = "0.1.0"
