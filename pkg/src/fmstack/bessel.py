"""Bessel functions of the first kind, integer order.

Downward (Miller) recurrence normalized with J_0 + 2*sum(J_2k) = 1 for the
general case; the alternating power series covers small arguments and low
orders where it converges without cancellation.
"""

import math

import numpy as np

_RESCALE = 1e250
_SERIES_MAX_Z = 4.0
_SERIES_MAX_N = 12


def _series(n: int, z: float) -> float:
    # sum_k (-1)^k (z/2)^(n+2k) / (k! (n+k)!); safe for z <= 4, n <= 12
    half = 0.5 * z
    term = half**n / math.factorial(n)
    total = term
    for k in range(1, 200):
        term *= -(half * half) / (k * (n + k))
        total += term
        if abs(term) <= 1e-17 * (abs(total) + 1e-30):
            break
    return total


def _miller_start(max_order: int, z: float) -> int:
    m = max(max_order, int(math.ceil(z)))
    m += 1 + int(math.ceil(math.sqrt(160.0 * (m + 1))))
    return m + (m & 1)


def bessel_row(max_order: int, z: float) -> np.ndarray:
    """J_0(z)..J_max_order(z) as one array; z must be >= 0."""
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    if z < 0:
        raise ValueError("z must be >= 0 (use bessel_j for signed arguments)")
    row = np.zeros(max_order + 1)
    if z == 0.0:
        row[0] = 1.0
        return row
    j_hi = 0.0  # unnormalized J_{k+1}
    j_k = 1e-30  # seed at the start order
    even_sum = 0.0
    for k in range(_miller_start(max_order, z), 0, -1):
        if k <= max_order:
            row[k] = j_k
        if k % 2 == 0:
            even_sum += j_k
        j_lo = (2.0 * k / z) * j_k - j_hi
        j_hi, j_k = j_k, j_lo
        if abs(j_k) > _RESCALE:
            j_k /= _RESCALE
            j_hi /= _RESCALE
            even_sum /= _RESCALE
            row /= _RESCALE
    row[0] = j_k
    row /= j_k + 2.0 * even_sum
    return row


def bessel_j(n: int, z: float) -> float:
    """J_n(z) for any integer n and real z, via parity for negative arguments."""
    order = abs(n)
    sign = 1.0
    if order % 2 == 1:
        if n < 0:
            sign = -sign  # J_{-n} = (-1)^n J_n
        if z < 0:
            sign = -sign  # J_n(-z) = (-1)^n J_n(z)
    zz = abs(z)
    if zz <= _SERIES_MAX_Z and order <= _SERIES_MAX_N:
        return sign * _series(order, zz)
    return sign * float(bessel_row(order, zz)[order])
