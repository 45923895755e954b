"""NHC Lab - black-box Neighborhood Confidence estimation on desk-scale classifiers."""

__version__ = "1.0.0"
