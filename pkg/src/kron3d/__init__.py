"""3D MIMO channel correlation, Kronecker approximation and product-codebook feedback."""
from .channel import ArrayGeometry, ChannelParams, PathDraw, PathDraws
from .codebook import Codebook, PackingQuality
from .linalg import EigenDecomposition

__all__ = [
    "ArrayGeometry",
    "ChannelParams",
    "Codebook",
    "EigenDecomposition",
    "PackingQuality",
    "PathDraw",
    "PathDraws",
]
