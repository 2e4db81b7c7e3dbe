"""Sawtooth, Vaaler's trigonometric approximation, smoothing bumps and the counting identity.

Conventions: ``e(x) = exp(2*pi*i*x)``, ``psi(x) = 1/2 - {x}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi


def psi(x):
    """``1/2 - {x}``; works on scalars and arrays."""
    x = np.asarray(x, dtype=float)
    out = 0.5 - (x - np.floor(x))
    return float(out) if out.ndim == 0 else out


def e(x):
    """``exp(2 pi i x)`` with the argument reduced mod 1 first."""
    x = np.asarray(x, dtype=float)
    return np.exp(1j * TWO_PI * (x - np.floor(x)))


def vaaler_J(t):
    """Vaaler's weight ``pi t (1-|t|) cot(pi t) + |t|`` (even, J(0) = 1)."""
    t = np.abs(np.asarray(t, dtype=float))
    out = np.ones_like(t)
    nz = t > 0
    tt = t[nz]
    out[nz] = math.pi * tt * (1 - tt) / np.tan(math.pi * tt) + tt
    return out


@dataclass
class VaalerApprox:
    """Coefficients of Vaaler's approximation of order H.

    ``a[h]`` and ``b[h]`` are stored for ``h = -H..H`` at index ``h + H``;
    ``a[0] = 0``.  The recorded constants satisfy ``|a_h| <= a_const/|h|`` and
    ``b_h <= b_const/H``.
    """

    H: int
    a: np.ndarray
    b: np.ndarray
    a_const: float = 1.0 / TWO_PI
    b_const: float = 0.5

    @property
    def freqs(self) -> np.ndarray:
        return np.arange(-self.H, self.H + 1)

    def coef(self, h: int) -> tuple[complex, float]:
        return complex(self.a[h + self.H]), float(self.b[h + self.H])

    def approx(self, x) -> np.ndarray:
        """Real trigonometric polynomial sum_{0<|h|<=H} a_h e(hx)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        h = np.arange(1, self.H + 1)
        ph = np.outer(x, h)
        ph -= np.floor(ph)
        # a_h e(hx) + a_{-h} e(-hx) = 2 Re(a_h e(hx))
        return 2.0 * (np.cos(TWO_PI * ph) @ self.a[self.H + 1:].real
                      - np.sin(TWO_PI * ph) @ self.a[self.H + 1:].imag)

    def majorant(self, x, real: bool = True) -> np.ndarray:
        """sum_{|h|<=H} b_h e(hx); complex if ``real`` is False."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        ph = np.outer(x, self.freqs)
        ph -= np.floor(ph)
        val = np.exp(1j * TWO_PI * ph) @ self.b.astype(complex)
        return val.real if real else val


def vaaler(H: int) -> VaalerApprox:
    if H < 1:
        raise ValueError("H must be >= 1")
    h = np.arange(-H, H + 1)
    a = np.zeros(2 * H + 1, dtype=complex)
    nz = h != 0
    a[nz] = vaaler_J(h[nz] / (H + 1)) / (TWO_PI * 1j * h[nz])
    b = (1.0 - np.abs(h) / (H + 1)) / (2 * H + 2)
    return VaalerApprox(H, a, b)


def vaaler_curve(H: int, x) -> np.ndarray:
    """Columns x, psi, approximation, majorant for plotting."""
    x = np.asarray(x, dtype=float)
    va = vaaler(H)
    return np.column_stack([x, psi(x), va.approx(x), va.majorant(x)])


def irwin_hall_cdf(t, r: int) -> np.ndarray:
    """CDF of the sum of r independent U(0, 1) variables."""
    t = np.asarray(t, dtype=float)
    flip = t > r / 2
    s = np.where(flip, r - t, t)
    s = np.clip(s, 0.0, None)
    out = np.zeros_like(s)
    for k in range(r + 1):
        term = (-1) ** k * math.comb(r, k) * np.where(s > k, s - k, 0.0) ** r
        out += term
    out /= math.factorial(r)
    out = np.where(flip, 1.0 - out, out)
    return np.clip(out, 0.0, 1.0)


@dataclass
class SmoothTheta:
    """Periodic bump: indicator of [alpha, beta] smoothed by r boxes of width Delta/r.

    The smoothing kernel has unit mass and support [-Delta/2, Delta/2], so
    theta is 1 on [alpha + Delta/2, beta - Delta/2] and 0 on
    [beta + Delta/2, 1 + alpha - Delta/2].
    """

    alpha: float
    beta: float
    Delta: float
    r: int

    def _kernel_cdf(self, y):
        w = self.Delta / self.r
        return irwin_hall_cdf((y + self.Delta / 2) / w, self.r)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        center = 0.5 * (self.alpha + self.beta)
        y = x - center
        y = y - np.floor(y + 0.5)  # in [-1/2, 1/2)
        lo, hi = self.alpha - center, self.beta - center
        out = np.zeros_like(y)
        for k in (-1, 0, 1):
            out += self._kernel_cdf(y + k - lo) - self._kernel_cdf(y + k - hi)
        return float(out) if out.ndim == 0 else out

    def g(self, m):
        """Fourier coefficients; ``g(0) = beta - alpha``."""
        m = np.asarray(m, dtype=float)
        out = np.empty(m.shape, dtype=complex)
        zero = m == 0
        out[zero] = self.beta - self.alpha
        mm = m[~zero]
        box = (e(-mm * self.alpha) - e(-mm * self.beta)) / (TWO_PI * 1j * mm)
        out[~zero] = box * np.sinc(mm * self.Delta / self.r) ** self.r
        return complex(out) if out.ndim == 0 else out

    def g_bound(self, m):
        """min(beta - alpha, 1/(pi|m|), (1/(pi|m|)) (r/(pi|m| Delta))**r) for m != 0."""
        m = np.abs(np.asarray(m, dtype=float))
        base = 1.0 / (math.pi * m)
        return np.minimum(np.minimum(self.beta - self.alpha, base),
                          base * (self.r / (math.pi * m * self.Delta)) ** self.r)

    def partial_sum(self, x, M: int):
        """sum_{|m| <= M} g(m) e(mx) (real part)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        m = np.arange(1, M + 1)
        gm = self.g(m)
        ph = np.outer(x, m)
        ph -= np.floor(ph)
        return (self.beta - self.alpha) + 2.0 * (np.exp(1j * TWO_PI * ph) @ gm).real


def smooth_theta(alpha: float, beta: float, Delta: float, r: int) -> SmoothTheta:
    if not 0 < Delta < 0.25:
        raise ValueError("need 0 < Delta < 1/4")
    if not Delta <= beta - alpha <= 1 - Delta:
        raise ValueError("need Delta <= beta - alpha <= 1 - Delta")
    if r < 1:
        raise ValueError("r must be >= 1")
    return SmoothTheta(alpha, beta, Delta, r)


@dataclass
class ThetaFamily:
    """Shifts theta_z(x) = theta(x - z/(2Z)), z = 0..2Z-1, of the bump around 0 of width 1/(2Z)."""

    Z: int
    r: int
    base: SmoothTheta = field(init=False)

    def __post_init__(self):
        if self.Z < 1 or self.r < 1:
            raise ValueError("Z and r must be >= 1")
        # Z <= 2 gives Delta >= 1/4; the tiling still holds, so skip the bump's own check
        self.base = SmoothTheta(-1 / (4 * self.Z), 1 / (4 * self.Z), 1 / (2 * self.Z), self.r)

    @property
    def size(self) -> int:
        return 2 * self.Z

    def shift(self, z: int) -> float:
        return z / (2 * self.Z)

    def member(self, z: int, x):
        return self.base(np.asarray(x, dtype=float) - self.shift(z))

    def g(self, z: int, m):
        m = np.asarray(m, dtype=float)
        return self.base.g(m) * e(-m * self.shift(z))

    def total(self, x):
        x = np.asarray(x, dtype=float)
        return sum(self.member(z, x) for z in range(self.size))

    def partial_sum(self, z: int, x, M: int):
        return self.base.partial_sum(np.asarray(x, dtype=float) - self.shift(z), M)


def theta_family(Z: int, r: int) -> ThetaFamily:
    return ThetaFamily(Z, r)


class CountCheck(NamedTuple):
    lhs: int
    rhs: float
    integer_endpoint: bool


def counting_identity_check(a: float, b: float) -> CountCheck:
    """Integers in [a, b) counted directly and via ``b - a - psi(-b) + psi(-a)``."""
    if not a < b:
        raise ValueError("need a < b")
    lhs = math.ceil(b) - math.ceil(a)
    rhs = b - a - psi(-b) + psi(-a)
    return CountCheck(lhs, rhs, float(a).is_integer() or float(b).is_integer())
