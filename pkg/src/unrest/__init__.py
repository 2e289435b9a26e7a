"""Protest forecasting from geo-tagged short-message corpora."""

from unrest.errors import InputError, InvariantError, UnrestError

__version__ = "0.1.0"

# 50 US states, canonical order used for every region-indexed output
US_STATES = (
    "AL", "AK", "AZ", "AR", "CA", "CO", "CT", "DE", "FL", "GA",
    "HI", "ID", "IL", "IN", "IA", "KS", "KY", "LA", "ME", "MD",
    "MA", "MI", "MN", "MS", "MO", "MT", "NE", "NV", "NH", "NJ",
    "NM", "NY", "NC", "ND", "OH", "OK", "OR", "PA", "RI", "SC",
    "SD", "TN", "TX", "UT", "VT", "VA", "WA", "WV", "WI", "WY",
)

__all__ = ["InputError", "InvariantError", "UnrestError", "US_STATES", "__version__"]
