"""Figure rendering for pofdma result CSVs.

Consumes only the delimited files the simulator writes (ccdf, avg_papr,
ber, psd, complexity) and never recomputes or mutates them.
"""

__version__ = "0.1.0"

from .render import FigureSpec, render_all  # noqa: F401
