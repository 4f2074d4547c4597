"""Coverage analysis of hybrid backscatter / harvest-then-transmit D2D links
powered by alpha-Ginibre ambient fields."""

from .params import SystemParams, load_config, validate

__version__ = "0.1.0"
__all__ = ["SystemParams", "load_config", "validate", "__version__"]
