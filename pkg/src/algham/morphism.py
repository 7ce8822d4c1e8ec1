"""Fibre metrics / morphisms pairing the dual bundle with the bundle."""

from __future__ import annotations

from dataclasses import dataclass

from .fields import DiffeoMap, MatrixField
from .linalg import mat_inv


@dataclass
class MorphismGH:
    """An invertible fibre morphism g (r x r, over the base) paired with
    the base map h.  ``gtilde`` is the matrix inverse, computed on the
    fly so it stays differentiable."""

    g: MatrixField
    h: DiffeoMap

    @property
    def r(self):
        s = self.g.shape
        return s[0] if s else None

    def g_at_h(self, x):
        """g composed through h: rows of g(h(x))."""
        return self.g.fn(self.h(list(x)))

    def gtilde_at_h(self, x):
        return mat_inv(self.g.fn(self.h(list(x))))

    def g_at(self, x):
        return self.g.fn(list(x))

    def gtilde_at(self, x):
        return mat_inv(self.g.fn(list(x)))
