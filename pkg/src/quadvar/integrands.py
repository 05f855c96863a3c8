"""Built-in test integrands with closed-form mean and standard deviation."""
from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import polynomial as P

from .estimate import FunctionOracle

NAMES = ("constant", "linear", "square", "sum-coords", "mean-coords", "product-coords", "poly")


def constant(D: int, value: float = 1.0) -> FunctionOracle:
    return FunctionOracle(lambda x: np.full(len(x), float(value)), D, float(value), 0.0)


def linear(D: int = 1) -> FunctionOracle:
    """``x_1``."""
    return FunctionOracle(lambda x: x[:, 0].copy(), D, 0.5, math.sqrt(1.0 / 12.0))


def square(D: int = 1) -> FunctionOracle:
    """``x_1 ** 2``."""
    return FunctionOracle(lambda x: x[:, 0] ** 2, D, 1.0 / 3.0, math.sqrt(1.0 / 5.0 - 1.0 / 9.0))


def sum_coords(D: int) -> FunctionOracle:
    return FunctionOracle(lambda x: x.sum(axis=1), D, D / 2.0, math.sqrt(D / 12.0))


def mean_coords(D: int) -> FunctionOracle:
    return FunctionOracle(lambda x: x.mean(axis=1), D, 0.5, math.sqrt(1.0 / (12.0 * D)))


def product_coords(D: int) -> FunctionOracle:
    var = 3.0 ** -D - 4.0 ** -D
    return FunctionOracle(lambda x: x.prod(axis=1), D, 2.0 ** -D, math.sqrt(var))


def separable_poly(D: int, coeffs) -> FunctionOracle:
    """``prod_d p(x_d)`` with ``p(t) = c0 + c1 t + c2 t^2 + ...``."""
    c = np.asarray(coeffs, dtype=float)
    if c.size == 0:
        raise ValueError("polynomial needs at least one coefficient")

    def unit_integral(poly):
        antideriv = P.polyint(poly)
        return P.polyval(1.0, antideriv) - P.polyval(0.0, antideriv)

    m1 = unit_integral(c)
    m2 = unit_integral(P.polymul(c, c))
    var = max(m2 ** D - m1 ** (2 * D), 0.0)
    return FunctionOracle(lambda x: P.polyval(x, c).prod(axis=1), D, m1 ** D, math.sqrt(var))


def by_name(spec: str, D: int) -> FunctionOracle:
    """Look up an integrand by name.

    ``constant`` and ``constant:7`` give constants; ``poly:1,0,3`` gives the
    separable polynomial ``prod_d (1 + 3 x_d^2)``.
    """
    name, _, arg = spec.partition(":")
    if name == "constant":
        return constant(D, float(arg) if arg else 1.0)
    if name == "poly":
        if not arg:
            raise ValueError("poly needs coefficients, e.g. poly:1,0,3")
        return separable_poly(D, [float(t) for t in arg.split(",")])
    if arg:
        raise ValueError(f"integrand {name!r} takes no argument")
    table = {
        "linear": linear,
        "square": square,
        "sum-coords": sum_coords,
        "mean-coords": mean_coords,
        "product-coords": product_coords,
    }
    if name not in table:
        raise ValueError(f"unknown integrand {spec!r}; choose from {', '.join(NAMES)}")
    return table[name](D)
