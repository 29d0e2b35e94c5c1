"""Panel renderer for scatdelay delay-scan CSV files."""

from .panel import MissingColumnError, PanelSpec, panel_figure, read_profile, render_panel

__all__ = [
    "MissingColumnError",
    "PanelSpec",
    "panel_figure",
    "read_profile",
    "render_panel",
]
