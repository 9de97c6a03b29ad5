"""Local solubility of plane cubic curves over p-adic fields, with exact densities."""

__version__ = "0.1.0"
