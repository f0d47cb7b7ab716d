"""Link-level uplink multiple-access simulator.

Compares five schemes (OFDMA, SC-FDMA and three periodic-allocation
variants) on peak-to-average power ratio, bit error rate, power spectral
density and operation counts, over a per-user tapped-delay-line fading
channel with additive white Gaussian noise.
"""

__version__ = "0.1.0"

from .txchain import SCHEMES, SchemeConfig, TxBlock  # noqa: F401
from .metrics import BerCounter, PsdEstimate  # noqa: F401
from .channel import ChannelProfile, ChannelRealization  # noqa: F401
from .complexity import ComplexityReport, op_counts, total_counts  # noqa: F401
from .harness import ExperimentConfig, ConfigError  # noqa: F401
