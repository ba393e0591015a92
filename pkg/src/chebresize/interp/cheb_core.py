"""
Chebyshev (first kind) and equispaced node systems on ]-1, 1[, the
fundamental Lagrange polynomials on them, and the resize matrices V1/V2
such that a channel C of n x m samples resizes to N x M as V1.T @ C @ V2.
"""
import math
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import fft as sp_fft
from direct.directnotify.DirectNotifyGlobal import directNotify

from ..core.errors import DuplicateNodeError, InvalidSizeError, OperatorTooLargeError

notify = directNotify.newCategory("ChebCore")

DEFAULT_MAX_OPERATOR_ELEMENTS = 2 ** 26
DEFAULT_LEBESGUE_SAMPLES = 10001


class NodeFamily(str, Enum):
    CHEBYSHEV = "chebyshev"
    EQUISPACED = "equispaced"


class OperatorBackend(str, Enum):
    DIRECT = "direct"
    FCT = "fct"


def _check_order(mu):
    if int(mu) != mu or mu < 1:
        raise InvalidSizeError(f"node order must be a positive integer, got {mu}")
    return int(mu)


def _frozen(array):
    array = np.ascontiguousarray(array, dtype=np.float64)
    array.setflags(write=False)
    return array


class ChebyshevGrid:
    """Zeros of T_mu: nodes[k-1] = cos(angles[k-1]), angles[k-1] = (2k-1)pi/(2mu)."""

    family = NodeFamily.CHEBYSHEV

    def __init__(self, mu):
        self.order = _check_order(mu)
        k = np.arange(1, self.order + 1, dtype=np.float64)
        self.angles = _frozen((2.0 * k - 1.0) * math.pi / (2.0 * self.order))
        # cos(angle) as sin(pi/2 - angle): exact zero midpoint and exact antisymmetry
        shifted = np.arange(self.order - 1, -self.order, -2, dtype=np.float64)
        self.nodes = _frozen(np.sin(0.5 * math.pi / self.order * shifted))

    def angle_fraction(self, k):
        """Angle of node k (1-based) as an exact multiple of pi."""
        return Fraction(2 * k - 1, 2 * self.order)

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"ChebyshevGrid(order={self.order})"


class EquispacedGrid:
    """Internal equidistant nodes: nodes[k-1] = -1 + 2k/(mu+1)."""

    family = NodeFamily.EQUISPACED

    def __init__(self, mu):
        self.order = _check_order(mu)
        k = np.arange(1, self.order + 1, dtype=np.float64)
        self.nodes = _frozen(-1.0 + 2.0 * k / (self.order + 1))

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"EquispacedGrid(order={self.order})"


def make_chebyshev_grid(mu):
    return ChebyshevGrid(mu)


def make_equispaced_grid(mu):
    return EquispacedGrid(mu)


NODE_FAMILIES = {
    NodeFamily.CHEBYSHEV: make_chebyshev_grid,
    NodeFamily.EQUISPACED: make_equispaced_grid,
}


def get_node_grid(family, mu):
    try:
        grid_func = NODE_FAMILIES[NodeFamily(family)]
    except ValueError:
        raise InvalidSizeError(f"unknown node family '{family}'") from None
    return grid_func(mu)


def _trig_weights(mu):
    weights = np.ones(mu)
    weights[0] = 0.5
    return weights


def lagrange_basis_trig(mu, k, t):
    """
    l_k^mu(cos t) through the cosine sum
    (2/mu) * sum'_{r=0}^{mu-1} cos((2k-1) r pi / (2 mu)) cos(r t), first term halved.
    """
    mu = _check_order(mu)
    if not 1 <= k <= mu:
        raise InvalidSizeError(f"basis index {k} outside 1..{mu}")
    r = np.arange(mu, dtype=np.float64)
    node_angle = (2.0 * k - 1.0) * math.pi / (2.0 * mu)
    terms = _trig_weights(mu) * np.cos(r * node_angle) * np.cos(r * t)
    return float(2.0 / mu * math.fsum(terms))


def lagrange_basis_product(nodes, k, x):
    """prod_{s != k} (x - x_s) / (x_k - x_s), k 1-based."""
    nodes = np.asarray(nodes, dtype=np.float64)
    mu = len(nodes)
    if not 1 <= k <= mu:
        raise InvalidSizeError(f"basis index {k} outside 1..{mu}")
    if len(np.unique(nodes)) != mu:
        raise DuplicateNodeError("product-form basis needs pairwise distinct nodes")
    xk = nodes[k - 1]
    value = 1.0
    for s, xs in enumerate(nodes):
        if s == k - 1:
            continue
        value *= (x - xs) / (xk - xs)
    return float(value)


def product_basis_matrix(nodes, x):
    """All product-form basis values: entry [k, p] = l_k(x[p]) for the given nodes."""
    nodes = np.asarray(nodes, dtype=np.float64)
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    mu = len(nodes)
    if len(np.unique(nodes)) != mu:
        raise DuplicateNodeError("product-form basis needs pairwise distinct nodes")
    diffs = x[np.newaxis, :] - nodes[:, np.newaxis]
    node_gaps = nodes[:, np.newaxis] - nodes[np.newaxis, :]
    values = np.empty((mu, len(x)))
    for k in range(mu):
        others = np.arange(mu) != k
        values[k] = np.prod(diffs[others] / node_gaps[k, others][:, np.newaxis], axis=0)
    return values


def trig_basis_matrix(mu, t):
    """All cosine-sum basis values: entry [k, p] = l_k^mu(cos t[p])."""
    grid = make_chebyshev_grid(mu)
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    r = np.arange(grid.order, dtype=np.float64)
    source = np.cos(np.outer(r, grid.angles)) * _trig_weights(grid.order)[:, np.newaxis]
    target = np.cos(np.outer(r, t))
    return 2.0 / grid.order * (source.T @ target)


def basis_matrix(family, mu, x):
    """Basis values l_k^mu(x) for every node k and abscissa x of the family."""
    family = NodeFamily(family)
    if family is NodeFamily.CHEBYSHEV:
        t = np.arccos(np.clip(np.atleast_1d(np.asarray(x, dtype=np.float64)), -1.0, 1.0))
        return trig_basis_matrix(mu, t)
    return product_basis_matrix(make_equispaced_grid(mu).nodes, x)


def lebesgue_function(family, mu, x):
    return np.abs(basis_matrix(family, mu, x)).sum(axis=0)


def lebesgue_constant(family, mu, samples=DEFAULT_LEBESGUE_SAMPLES):
    """Max of the Lebesgue function over `samples` uniform points of [-1, 1]."""
    x = np.linspace(-1.0, 1.0, samples)
    return float(lebesgue_function(family, mu, x).max())


def coincident_index(n, N, k):
    """
    1-based index i with x_k^N == x_i^n exactly (equal angle fractions
    (2k-1)/(2N) == (2i-1)/(2n)), or None.
    """
    scaled = Fraction(n * (2 * k - 1), N)
    if scaled.denominator != 1 or scaled.numerator % 2 == 0:
        return None
    return (scaled.numerator + 1) // 2


def is_odd_factor(n, N):
    return n % N == 0 and (n // N) % 2 == 1


class ResizeOperator:
    """
    The matrix pair (V1, V2), V1[i, k] = l_i^n(x_k^N) (n x N) and
    V2[j, h] = l_j^m(x_h^M) (m x M). Immutable.
    """

    __slots__ = ("v1", "v2", "source_size", "target_size", "node_family")

    def __init__(self, v1, v2, source_size, target_size, node_family):
        self.v1 = _frozen(v1)
        self.v2 = _frozen(v2)
        self.source_size = tuple(source_size)
        self.target_size = tuple(target_size)
        self.node_family = NodeFamily(node_family)

    def apply(self, channel):
        return self.v1.T @ np.asarray(channel, dtype=np.float64) @ self.v2

    def __repr__(self):
        (n, m), (N, M) = self.source_size, self.target_size
        return f"ResizeOperator({n}x{m} -> {N}x{M}, {self.node_family.value})"


def _chebyshev_axis_direct(n, N):
    source = make_chebyshev_grid(n)
    target = make_chebyshev_grid(N)
    r = np.arange(n, dtype=np.float64)
    weighted = np.cos(np.outer(r, source.angles)) * _trig_weights(n)[:, np.newaxis]
    return 2.0 / n * (weighted.T @ np.cos(np.outer(r, target.angles)))


def _chebyshev_axis_fct(n, N):
    # DCT-III of column k of cos(r t_k^N) gives 1 + 2 sum_{r>=1} cos(r t_i^n) cos(r t_k^N)
    target = make_chebyshev_grid(N)
    r = np.arange(n, dtype=np.float64)
    return sp_fft.dct(np.cos(np.outer(r, target.angles)), type=3, axis=0) / n


def _stamp_coincident_columns(matrix, n, N):
    for k in range(1, N + 1):
        i = coincident_index(n, N, k)
        if i is not None:
            matrix[:, k - 1] = 0.0
            matrix[i - 1, k - 1] = 1.0
    return matrix


def _axis_matrix(n, N, family, backend):
    if family is NodeFamily.EQUISPACED:
        return product_basis_matrix(make_equispaced_grid(n).nodes, make_equispaced_grid(N).nodes)
    if is_odd_factor(n, N):
        s = n // N
        matrix = np.zeros((n, N))
        k = np.arange(1, N + 1)
        matrix[(s * (2 * k - 1) + 1) // 2 - 1, k - 1] = 1.0
        return matrix
    if backend is OperatorBackend.FCT:
        matrix = _chebyshev_axis_fct(n, N)
    else:
        matrix = _chebyshev_axis_direct(n, N)
    return _stamp_coincident_columns(matrix, n, N)


def _axis_elements(n, N, family, backend):
    if family is NodeFamily.CHEBYSHEV and is_odd_factor(n, N):
        return n * N
    if family is NodeFamily.CHEBYSHEV and backend is OperatorBackend.DIRECT:
        return max(n * n, n * N)
    return n * N


def _check_resources(n, m, N, M, family, backend, max_elements):
    for rows, cols in ((n, N), (m, M)):
        if _axis_elements(rows, cols, family, backend) > max_elements:
            raise OperatorTooLargeError(rows, cols, max_elements)


DEFAULT_CACHE_SIZE = 32


def _build_operator(n, m, N, M, family, backend):
    notify.debug(f"building {family.value} operator {n}x{m} -> {N}x{M} ({backend.value})")
    v1 = _axis_matrix(n, N, family, backend)
    v2 = v1 if (m, M) == (n, N) else _axis_matrix(m, M, family, backend)
    return ResizeOperator(v1, v2, (n, m), (N, M), family)


def build_resize_operator(n, m, N, M, family=NodeFamily.CHEBYSHEV,
                          backend=OperatorBackend.DIRECT,
                          max_elements=DEFAULT_MAX_OPERATOR_ELEMENTS):
    for size in (n, m, N, M):
        _check_order(size)
    family = NodeFamily(family)
    backend = OperatorBackend(backend)
    _check_resources(n, m, N, M, family, backend, max_elements)
    return _cached_operator(int(n), int(m), int(N), int(M), family, backend)


_cached_operator = lru_cache(maxsize=DEFAULT_CACHE_SIZE)(_build_operator)


def configure_operator_cache(size):
    """Replace the operator cache with an empty one holding up to `size` entries."""
    global _cached_operator
    _cached_operator = lru_cache(maxsize=max(int(size), 0))(_build_operator)


def operator_cache_info():
    return _cached_operator.cache_info()


def clear_operator_cache():
    _cached_operator.cache_clear()
