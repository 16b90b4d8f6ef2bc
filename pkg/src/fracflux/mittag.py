"""Two-parameter Mittag-Leffler function and sector scans of its modulus.

``E_{nu,mu}(z) = sum_k z**k / Gamma(mu + nu*k)`` is summed directly.  Once
the modulus ratio of consecutive terms drops below 1/2 it stays there (the
Gamma ratio is monotone), so the remainder is bounded by twice the next term
and the loop stops as soon as that bound is below double-precision
resolution of the partial sum.

Double-precision summation loses digits where the terms cancel (large
``|z|`` away from the positive axis): the rounding error is about ``eps``
times the largest term.  Points that lose more than three digits this way
are summed again in extended precision with mpmath, so the returned value
carries the full truncation accuracy everywhere in ``|z| <= 100``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.special import gammaln, rgamma

from .lattice import FracFluxError

__all__ = [
    "MLParams",
    "SectorSpec",
    "OutOfDomainError",
    "NonConvergenceError",
    "ml_eval",
    "ml_sector_samples",
    "ml_sector_min_modulus",
    "MAX_ABS_Z",
    "MAX_TERMS",
]

MAX_ABS_Z = 100.0
MAX_TERMS = 10_000


class OutOfDomainError(FracFluxError, ValueError):
    pass


class NonConvergenceError(FracFluxError, ArithmeticError):
    pass


@dataclass(frozen=True)
class MLParams:
    nu: float
    mu: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.nu <= 4.0):
            raise OutOfDomainError(f"nu must lie in (0, 4], got {self.nu}")
        if not (0.0 < self.mu <= 4.0):
            raise OutOfDomainError(f"mu must lie in (0, 4], got {self.mu}")

    def __call__(self, z):
        return ml_eval(self, z)


@dataclass(frozen=True)
class SectorSpec:
    """Sample set ``{r * exp(i theta)}`` with ``|theta| <= half_angle``."""

    half_angle: float
    radii: tuple[float, ...] = field(default=())
    rays: int = 41

    def __post_init__(self):
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if not (0.0 < self.half_angle <= math.pi + 1e-15):
            raise ValueError(f"half_angle must lie in (0, pi], got {self.half_angle}")
        if self.rays < 3:
            raise ValueError(f"need at least 3 rays, got {self.rays}")
        if not self.radii:
            raise ValueError("at least one radius is required")
        r = np.asarray(self.radii)
        if not (np.all(np.isfinite(r)) and np.all(r >= 0)):
            raise ValueError("radii must be finite and nonnegative")

    @classmethod
    def logspaced(cls, half_angle: float, rmin: float, rmax: float, count: int = 40,
                  rays: int = 41) -> "SectorSpec":
        return cls(half_angle, tuple(np.geomspace(rmin, rmax, count)), rays)

    def points(self) -> np.ndarray:
        theta = np.linspace(-self.half_angle, self.half_angle, self.rays)
        r = np.asarray(self.radii)
        return (r[:, None] * np.exp(1j * theta)[None, :]).ravel()


def _neumaier(s: np.ndarray, c: np.ndarray, x: np.ndarray) -> None:
    t = s + x
    big = np.abs(s) >= np.abs(x)
    c += np.where(big, (s - t) + x, (x - t) + s)
    s[...] = t


def ml_eval(params: MLParams, z):
    """Evaluate ``E_{nu,mu}(z)`` for scalar or array ``z`` with ``|z| <= 100``."""
    nu, mu = float(params.nu), float(params.mu)
    z_arr = np.asarray(z, dtype=complex)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr).ravel()
    if np.any(~np.isfinite(z_arr)) or np.any(np.abs(z_arr) > MAX_ABS_Z):
        raise OutOfDomainError(f"|z| must not exceed {MAX_ABS_Z:g}")

    re_s, re_c = np.zeros(z_arr.shape), np.zeros(z_arr.shape)
    im_s, im_c = np.zeros(z_arr.shape), np.zeros(z_arr.shape)
    term = np.full(z_arr.shape, rgamma(mu), dtype=complex)
    peak = np.abs(term)
    active = np.ones(z_arr.shape, dtype=bool)
    absz = np.abs(z_arr)

    for k in range(MAX_TERMS):
        _neumaier(re_s, re_c, np.where(active, term.real, 0.0))
        _neumaier(im_s, im_c, np.where(active, term.imag, 0.0))
        step = math.exp(gammaln(mu + nu * k) - gammaln(mu + nu * (k + 1)))
        ratio = absz * step
        with np.errstate(over="ignore", invalid="ignore"):
            term = term * z_arr * step
        if not np.all(np.isfinite(term[active])):
            raise NonConvergenceError(
                "series terms overflow double range before the tail is certified"
            )
        peak = np.maximum(peak, np.abs(term))
        total = np.hypot(re_s + re_c, im_s + im_c)
        tail = 2.0 * np.abs(term)
        floor = np.maximum(total, peak * np.finfo(float).eps)
        done = (ratio < 0.5) & (tail <= 1e-17 * floor)
        active &= ~done
        if not active.any():
            break
    else:
        raise NonConvergenceError(
            f"tail bound not certified within {MAX_TERMS} terms"
        )
    out = (re_s + re_c) + 1j * (im_s + im_c)
    lossy = peak * np.finfo(float).eps > 1e-13 * np.abs(out)
    for i in np.flatnonzero(lossy & (peak > 0)):
        out[i] = _ml_extended(nu, mu, complex(z_arr[i]), float(peak[i]))
    return complex(out[0]) if scalar else out.reshape(np.shape(z))


def _ml_extended(nu: float, mu: float, z: complex, peak: float) -> complex:
    # enough digits to absorb the cancellation plus a 20-digit margin
    dps = 20 + max(0, int(math.ceil(math.log10(max(peak, 1.0))))) + 16
    with mpmath.workdps(dps):
        zz = mpmath.mpc(z)
        nu_m, mu_m = mpmath.mpf(nu), mpmath.mpf(mu)
        total = mpmath.mpc(0)
        term = 1 / mpmath.gamma(mu_m)
        zk = mpmath.mpc(1)
        tiny = mpmath.mpf(10) ** (-dps)
        for k in range(MAX_TERMS):
            total += zk * term
            zk *= zz
            term = 1 / mpmath.gamma(mu_m + nu_m * (k + 1))
            nxt = abs(zk * term)
            ratio = abs(zz) * mpmath.gamma(mu_m + nu_m * k) * term
            if ratio < 0.5 and 2 * nxt <= tiny * max(abs(total), mpmath.mpf(peak)):
                break
        else:
            raise NonConvergenceError(
                f"tail bound not certified within {MAX_TERMS} terms"
            )
        return complex(total)


def ml_sector_samples(nu: float, sector: SectorSpec, mu: float = 1.0):
    """Return sample points and ``|E_{nu,mu}|`` at each."""
    pts = sector.points()
    vals = ml_eval(MLParams(nu, mu), pts)
    return pts, np.abs(vals)


def ml_sector_min_modulus(nu: float, sector: SectorSpec) -> tuple[float, complex]:
    """Minimum of ``|E_{nu,1}|`` over the sector samples and where it occurs.

    Zeros of ``E_{nu,1}`` for ``1 < nu < 2`` lie outside ``|arg z| <= pi*nu/2``,
    so the minimum is expected to be positive whenever ``half_angle`` is at
    most that angle.  Wider sectors are scanned the same way.
    """
    if not 1.0 < nu < 2.0:
        raise OutOfDomainError(f"nu must lie in (1, 2), got {nu}")
    pts, mod = ml_sector_samples(nu, sector)
    i = int(np.argmin(mod))
    return float(mod[i]), complex(pts[i])
