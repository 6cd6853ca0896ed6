"""Figure regeneration for the NLS relaxation benchmark CSVs."""

__version__ = "0.1.0"

from .render import FIGURE_IDS, FigureSpec, SchemaError, render
