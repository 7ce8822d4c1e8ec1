"""Forward-mode dual numbers with tagged nesting.

Each call to :func:`derivative` allocates a fresh tag and seeds one
coordinate with an infinitesimal carrying that tag.  Arithmetic keeps
layers ordered (larger tag outermost), so derivative evaluations may be
nested freely through closures: a field whose definition internally
differentiates another field can itself be differentiated exactly.
"""

from __future__ import annotations

import itertools
import math

_NUM = (int, float)
_tag_counter = itertools.count(1)


class Dual:
    __slots__ = ("val", "eps", "tag")

    def __init__(self, val, eps, tag):
        self.val = val
        self.eps = eps
        self.tag = tag

    # -- helpers -------------------------------------------------------
    def _split(self, tag):
        """(value-part, eps-part) of self with respect to layer `tag`."""
        if self.tag == tag:
            return self.val, self.eps
        return self, 0.0

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Dual):
            t = max(self.tag, other.tag)
            a, da = self._split(t)
            b, db = other._split(t)
            return Dual(a + b, da + db, t)
        return Dual(self.val + other, self.eps, self.tag)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Dual(-self.val, -self.eps, self.tag)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Dual):
            t = max(self.tag, other.tag)
            a, da = self._split(t)
            b, db = other._split(t)
            return Dual(a * b, da * b + a * db, t)
        return Dual(self.val * other, self.eps * other, self.tag)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            t = max(self.tag, other.tag)
            a, da = self._split(t)
            b, db = other._split(t)
            q = a / b
            return Dual(q, (da - q * db) / b, t)
        return Dual(self.val / other, self.eps / other, self.tag)

    def __rtruediv__(self, other):
        q = other / self.val
        return Dual(q, -q / self.val * self.eps, self.tag)

    def __pow__(self, n):
        if isinstance(n, _NUM):
            if n == 0:
                return Dual(self.val ** 0, 0.0 * self.eps, self.tag)
            return Dual(self.val ** n, (n * self.val ** (n - 1)) * self.eps,
                        self.tag)
        return exp(n * log(self))

    def __rpow__(self, base):
        return exp(self * math.log(base))

    # -- comparisons act on the underlying value -----------------------
    def __lt__(self, other):
        return value_of(self) < value_of(other)

    def __le__(self, other):
        return value_of(self) <= value_of(other)

    def __gt__(self, other):
        return value_of(self) > value_of(other)

    def __ge__(self, other):
        return value_of(self) >= value_of(other)

    def __abs__(self):
        return self if value_of(self) >= 0 else -self

    def __repr__(self):
        return f"Dual({self.val!r}, {self.eps!r}; t{self.tag})"


def value_of(x):
    """Strip all dual layers, returning the underlying float."""
    while isinstance(x, Dual):
        x = x.val
    return x


def derivative(fn, coords, idx):
    """Exact partial derivative of fn(list) along coordinate idx.

    Works when `coords` already contains duals from an enclosing
    derivative: the fresh tag keeps the layers apart.
    """
    tag = next(_tag_counter)
    seeded = list(coords)
    seeded[idx] = Dual(seeded[idx], 1.0, tag)
    out = fn(seeded)
    return _eps_part(out, tag)


def derivative2(fn, coords, idx):
    """(value, derivative) in one pass."""
    tag = next(_tag_counter)
    seeded = list(coords)
    seeded[idx] = Dual(seeded[idx], 1.0, tag)
    out = fn(seeded)
    return _val_part(out, tag), _eps_part(out, tag)


def _eps_part(x, tag):
    if isinstance(x, (list, tuple)):
        return [_eps_part(v, tag) for v in x]
    if isinstance(x, Dual) and x.tag == tag:
        return x.eps
    return 0.0


def _val_part(x, tag):
    if isinstance(x, (list, tuple)):
        return [_val_part(v, tag) for v in x]
    if isinstance(x, Dual) and x.tag == tag:
        return x.val
    return x


def _lift1(f, df):
    def wrapped(x):
        if isinstance(x, Dual):
            return Dual(wrapped(x.val), df(x.val) * x.eps, x.tag)
        return f(x)
    return wrapped


sin = _lift1(math.sin, lambda v: cos(v))
cos = _lift1(math.cos, lambda v: -sin(v))
exp = _lift1(math.exp, lambda v: exp(v))
log = _lift1(math.log, lambda v: 1.0 / v)
sqrt = _lift1(math.sqrt, lambda v: 0.5 / sqrt(v))
tanh = _lift1(math.tanh, lambda v: 1.0 - tanh(v) ** 2)
