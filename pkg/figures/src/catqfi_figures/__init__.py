"""Figure rendering for catqfi sweep CSVs."""
from .recipes import RECIPES, FigureRecipe, crossover_eta, render
from .schema import Row, SchemaError, read_rows

__version__ = "0.1.0"

__all__ = ["RECIPES", "FigureRecipe", "Row", "SchemaError", "crossover_eta",
           "read_rows", "render"]
