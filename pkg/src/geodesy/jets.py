"""Order-2 multivariate jets for differentiating metric components.

A :class:`Taylor2` carries a value together with its gradient and Hessian
with respect to n chart coordinates. Rational arithmetic on these objects is
exact to roundoff, which is what lets curvature checks meet 1e-6 tolerances
without any finite-difference step tuning. Entries may be complex while the
coordinates stay real (Kähler-Norden charts) or complex coordinates may carry
holomorphic derivatives (complex Riemannian charts); the chain and product
rules below are identical in all cases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import Jet2


@dataclass(frozen=True)
class Taylor2:
    value: complex
    grad: np.ndarray  # shape (n,)
    hess: np.ndarray  # shape (n, n), symmetric

    @property
    def n(self) -> int:
        return self.grad.shape[0]

    @staticmethod
    def constant(c, n: int, dtype=np.float64) -> "Taylor2":
        return Taylor2(c, np.zeros(n, dtype), np.zeros((n, n), dtype))

    @staticmethod
    def coordinate(value, k: int, n: int, dtype=np.float64) -> "Taylor2":
        grad = np.zeros(n, dtype)
        grad[k] = 1
        return Taylor2(value, grad, np.zeros((n, n), dtype))

    def _coerce(self, other) -> "Taylor2":
        if isinstance(other, Taylor2):
            return other
        return Taylor2.constant(other, self.n, self.grad.dtype)

    def __add__(self, other) -> "Taylor2":
        o = self._coerce(other)
        return Taylor2(self.value + o.value, self.grad + o.grad, self.hess + o.hess)

    __radd__ = __add__

    def __sub__(self, other) -> "Taylor2":
        o = self._coerce(other)
        return Taylor2(self.value - o.value, self.grad - o.grad, self.hess - o.hess)

    def __rsub__(self, other) -> "Taylor2":
        return self._coerce(other) - self

    def __neg__(self) -> "Taylor2":
        return Taylor2(-self.value, -self.grad, -self.hess)

    def __mul__(self, other) -> "Taylor2":
        o = self._coerce(other)
        outer = np.outer(self.grad, o.grad)
        return Taylor2(
            self.value * o.value,
            self.value * o.grad + o.value * self.grad,
            self.value * o.hess + o.value * self.hess + outer + outer.T,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Taylor2":
        o = self._coerce(other)
        v = self.value / o.value
        grad = (self.grad - v * o.grad) / o.value
        cross = np.outer(grad, o.grad)
        hess = (self.hess - v * o.hess - cross - cross.T) / o.value
        return Taylor2(v, grad, hess)

    def __rtruediv__(self, other) -> "Taylor2":
        return self._coerce(other) / self

    def __pow__(self, p: int) -> "Taylor2":
        if not isinstance(p, int) or p < 1:
            raise ValueError("Taylor2 powers are positive integers")
        out = self
        for _ in range(p - 1):
            out = out * self
        return out

    def real(self) -> "Taylor2":
        """Componentwise real part; valid when the coordinates are real."""
        return Taylor2(self.value.real, self.grad.real, self.hess.real)

    def imag(self) -> "Taylor2":
        return Taylor2(self.value.imag, self.grad.imag, self.hess.imag)


def compose_jet(outer: Jet2, inner: Taylor2) -> Taylor2:
    """Chain rule for f(g(x)): ``outer`` is the scalar jet of f at g's value."""
    outer_prod = np.outer(inner.grad, inner.grad)
    return Taylor2(
        outer.value,
        outer.d1 * inner.grad,
        outer.d1 * inner.hess + outer.d2 * outer_prod,
    )
