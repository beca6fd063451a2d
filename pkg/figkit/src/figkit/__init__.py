"""Batch figure renderer for simulator metrics CSVs.

Three figure kinds, each grouped into one series per objective function:
delivery-ratio and mean-power timeseries from pdr_timeseries.csv files, and
per-node mean-power bars from power_per_node.csv files.
"""

from .render import (
    FigkitError, load_rows, render, render_pdr_timeseries,
    render_power_per_node, render_power_timeseries, save,
)
