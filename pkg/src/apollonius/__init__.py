"""Exact-arithmetic engine for the problem of Apollonius.

Computes the eight tangent circles of three mutually non-tangent circles
with non-collinear centers over Q, F_p, or quadratic-extension towers,
together with the bilinear-form-valued solution count and its duality
structure.
"""

from __future__ import annotations

__version__ = "0.1.0"
