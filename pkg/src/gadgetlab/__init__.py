"""Motion planning of a single robot through systems of gadgets."""
from .gadget import (ComplexityClass, Gadget, GadgetError, TunnelDecomposition, TunnelKind,
                     classify_complexity, is_deterministic, is_reversible, tunnel_decomposition)
from .catalog import standard_catalog

__all__ = [
    "ComplexityClass", "Gadget", "GadgetError", "TunnelDecomposition", "TunnelKind",
    "classify_complexity", "is_deterministic", "is_reversible", "tunnel_decomposition",
    "standard_catalog",
]
