"""
Test functions g on the response space.

Catalog functionals also carry an analytic form: a sum of monomial terms
coef * y^power * 1{y <= threshold}. Sums, scalings and products of such
functionals stay in that form, which is what synthetic ground truths use to
evaluate conditional means and covariances in closed form.
"""
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from util.errors import InvalidArgumentError

CDF_CLASS_TOKEN = "cdf"


@dataclass(frozen=True)
class Monomial:
    coef: float
    power: int = 0
    threshold: Optional[float] = None

    def scale(self, a: float) -> "Monomial":
        return Monomial(self.coef * a, self.power, self.threshold)

    def __mul__(self, other: "Monomial") -> "Monomial":
        if self.threshold is None:
            threshold = other.threshold
        elif other.threshold is None:
            threshold = self.threshold
        else:
            threshold = min(self.threshold, other.threshold)
        return Monomial(self.coef * other.coef, self.power + other.power, threshold)


@dataclass(frozen=True)
class Functional:
    """
    A real-valued test function g.

    Attributes:
        id: name used in records and outputs.
        fn: vectorized map from an array of responses to an array of values.
        envelope: bound G on |g|, None when g is unbounded.
        terms: analytic monomial form, None when g has none.
        family: catalog family ('identity', 'square', 'const', 'cdf', 'coord'), None for composites.
        param: the family parameter (threshold, constant, coordinate).
    """
    id: str
    fn: Callable[[np.ndarray], np.ndarray]
    envelope: Optional[float] = None
    terms: Optional[Tuple[Monomial, ...]] = None
    family: Optional[str] = None
    param: Optional[float] = None

    def __call__(self, y) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(y, dtype=float)), dtype=float)

    @property
    def is_bounded(self) -> bool:
        return self.envelope is not None

    def scale(self, a: float) -> "Functional":
        a = float(a)
        fn = self.fn
        return Functional(
            id=f"{a:g}*{self.id}",
            fn=lambda y: a * fn(y),
            envelope=None if self.envelope is None else abs(a) * self.envelope,
            terms=None if self.terms is None else tuple(t.scale(a) for t in self.terms),
        )

    def __add__(self, other: "Functional") -> "Functional":
        f, g = self.fn, other.fn
        return Functional(
            id=f"({self.id}+{other.id})",
            fn=lambda y: f(y) + g(y),
            envelope=None if self.envelope is None or other.envelope is None else self.envelope + other.envelope,
            terms=None if self.terms is None or other.terms is None else self.terms + other.terms,
        )

    def __sub__(self, other: "Functional") -> "Functional":
        return self + other.scale(-1.0)

    def __mul__(self, other: "Functional") -> "Functional":
        f, g = self.fn, other.fn
        terms = None
        if self.terms is not None and other.terms is not None:
            terms = tuple(s * t for s in self.terms for t in other.terms)
        return Functional(
            id=f"({self.id}*{other.id})",
            fn=lambda y: f(y) * g(y),
            envelope=None if self.envelope is None or other.envelope is None else self.envelope * other.envelope,
            terms=terms,
        )


def identity() -> Functional:
    return Functional(id="identity", fn=lambda y: y, terms=(Monomial(1.0, 1),), family="identity")


def square() -> Functional:
    return Functional(id="square", fn=lambda y: y * y, terms=(Monomial(1.0, 2),), family="square")


def constant(c: float) -> Functional:
    c = float(c)
    return Functional(
        id=f"const:{c:g}",
        fn=lambda y: np.full(np.shape(y)[:1], c, dtype=float),
        envelope=abs(c),
        terms=(Monomial(c, 0),),
        family="const",
        param=c,
    )


def cdf_indicator(t: float) -> Functional:
    """g(y) = 1{y <= t}."""
    t = float(t)
    return Functional(
        id=f"cdf:{t:g}",
        fn=lambda y: (y <= t).astype(float),
        envelope=1.0,
        terms=(Monomial(1.0, 0, t),),
        family="cdf",
        param=t,
    )


def coordinate(j: int) -> Functional:
    """j-th coordinate of a vector response (1-based)."""
    j = int(j)
    if j < 1:
        raise InvalidArgumentError(f"Response coordinates are 1-based, got {j}.")
    return Functional(id=f"coord:{j}", fn=lambda y: y[:, j - 1], family="coord", param=float(j))


def is_cdf_class(token: str) -> bool:
    return token.strip().lower() == CDF_CLASS_TOKEN


def parse_functional(token: str) -> Functional:
    """
    Parse a catalog token: mean | identity | square | const:c | cdf:t | coord:j.
    """
    text = token.strip().lower()
    name, _, arg = text.partition(":")
    try:
        if name in ("mean", "identity") and not arg:
            return identity()
        if name == "square" and not arg:
            return square()
        if name == "const" and arg:
            return constant(float(arg))
        if name == "cdf" and arg:
            return cdf_indicator(float(arg))
        if name == "coord" and arg:
            value = float(arg)
            if not value.is_integer():
                raise ValueError("coordinate must be an integer")
            return coordinate(int(value))
    except ValueError as e:
        raise InvalidArgumentError(f"Cannot parse functional '{token}': {e}")
    if name == CDF_CLASS_TOKEN:
        raise InvalidArgumentError("'cdf' names the whole indicator class; use cdf:t for a single functional.")
    raise InvalidArgumentError(f"Unknown functional '{token}'.")
