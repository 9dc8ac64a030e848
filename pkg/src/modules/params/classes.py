"""
Degree classes with factor-2 hysteresis bands.

Layers L1 and L4 use T < L < M < H by degree in A (resp. C); layers L2 and L3 use
T < S < D by combined degree. Bands overlap by a factor of two; a canonical class
picks the lowest class whose band contains the degree.
"""

from typing import Optional, Tuple

from modules.graph.layered import L1, L4
from modules.params.thresholds import Thresholds

ENDPOINT_CLASSES = ("T", "L", "M", "H")
MIDDLE_CLASSES = ("T", "S", "D")

Band = Tuple[int, Optional[int]]


def is_endpoint_layer(layer: int) -> bool:
    return layer in (L1, L4)


def classes_for(layer: int) -> Tuple[str, ...]:
    return ENDPOINT_CLASSES if is_endpoint_layer(layer) else MIDDLE_CLASSES


def band(layer: int, cls: str, th: Thresholds) -> Band:
    """Inclusive degree band (low, high); high None means unbounded."""
    t, m, h = th.tiny, th.medium, th.high
    if is_endpoint_layer(layer):
        bands = {"T": (0, 2 * t), "L": (t, 2 * m), "M": (m, 2 * h), "H": (h, None)}
    else:
        bands = {"T": (0, 2 * t), "S": (t, 2 * h), "D": (h, None)}
    return bands[cls]


def in_band(layer: int, cls: str, degree: int, th: Thresholds) -> bool:
    low, high = band(layer, cls, th)
    return degree >= low and (high is None or degree <= high)


def canonical_class(layer: int, degree: int, th: Thresholds) -> str:
    """Lowest class whose band contains the degree."""
    for cls in classes_for(layer):
        if in_band(layer, cls, degree, th):
            return cls
    return classes_for(layer)[-1]
