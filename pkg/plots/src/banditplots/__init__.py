"""Figure rendering for structbandit CSV outputs."""

from .render import PlotError, PlotSpec, plot_pulls, plot_regret

__all__ = ["PlotError", "PlotSpec", "plot_pulls", "plot_regret"]
