"""Figure rendering for sgrkdg convergence tables and profiles."""

from .data import MissingColumnError, Table, read_table
from .spec import FIGURE_KINDS, FigureSpec, load_spec
from .render import render

__all__ = [
    "FIGURE_KINDS",
    "FigureSpec",
    "MissingColumnError",
    "Table",
    "load_spec",
    "read_table",
    "render",
]
