"""CSV-driven rendering of error-curve comparison figures.

Consumes the experiment harness's CSV schema
(``t,estimate,sq_error,stderr,n_paths``) and renders a log-scale figure.
No bound or error values are recomputed here; the CSVs are the single
source of truth.
"""

from .figure import PlotSpec, Series, plot_error_bundle, read_series

__all__ = ["PlotSpec", "Series", "plot_error_bundle", "read_series"]
__version__ = "0.1.0"
