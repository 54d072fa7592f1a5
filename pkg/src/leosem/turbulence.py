"""Kolmogorov phase screens, long-exposure image degradation, and quality metrics.

The classical Kolmogorov-theory constants are pinned here in one place:

- 0.423: coherence-length integral coefficient (Fried 1966),
  r0 = (0.423 k^2 Cn^2 L)^(-3/5) for a plane wave through a uniform layer.
- 0.023: phase power-spectral-density coefficient (Noll 1976),
  PSD(f) = 0.023 r0^(-5/3) f^(-11/3) with f in cycles/m.
- 6.88: structure-function coefficient, D(r) = 6.88 (r/r0)^(5/3).
- 3.44: long-exposure MTF exponent coefficient (= 6.88/2),
  MTF(f) = exp[-3.44 (lambda f / r0)^(5/3)] for angular frequency f.

Screens are generated with the FFT spectral method plus three levels of
low-order subharmonics to restore large-scale power (Lane et al. 1992).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import LeosemError
from .scenario import RecallCurve, TurbulenceParams

FRIED_COEFF = 0.423
PHASE_PSD_COEFF = 0.023
STRUCTURE_COEFF = 6.88
LONG_EXPOSURE_COEFF = 3.44

SUBHARMONIC_LEVELS = 3


@dataclass(frozen=True, eq=False)
class PhaseScreen:
    grid: np.ndarray  # (n, n) phase values in radians
    spacing_m: float
    r0_m: float


@dataclass(frozen=True, eq=False)
class GrayImage:
    pixels: np.ndarray  # (h, w) intensities in [0, 1]
    gsd_m: float = 0.5

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2:
            raise ValueError("image must be 2-D")
        if px.min() < -1e-12 or px.max() > 1.0 + 1e-12:
            raise ValueError("pixel values must lie in [0, 1]")
        object.__setattr__(self, "pixels", px)


def fried_parameter(t: TurbulenceParams) -> float:
    """Atmospheric coherence length r0 in meters; larger means weaker turbulence."""
    k = 2.0 * math.pi / t.wavelength_m
    return (FRIED_COEFF * k * k * t.cn2 * t.path_length_m) ** (-3.0 / 5.0)


def _phase_psd(f: np.ndarray, r0_m: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return PHASE_PSD_COEFF * r0_m ** (-5.0 / 3.0) * f ** (-11.0 / 3.0)


def generate_phase_screen(
    n: int,
    spacing_m: float,
    r0_m: float,
    seed,
    subharmonic_levels: int = SUBHARMONIC_LEVELS,
) -> PhaseScreen:
    """Spectral-method screen realization, deterministic for a given seed.

    Requires n to be a power of two >= 64 so the FFT grid resolves at least
    a few decades of the spectrum.
    """
    if n < 64 or (n & (n - 1)) != 0:
        raise LeosemError(f"invalid grid size {n}: must be a power of two >= 64")
    if spacing_m <= 0 or r0_m <= 0:
        raise ValueError("spacing_m and r0_m must be positive")
    rng = np.random.default_rng(seed)

    df = 1.0 / (n * spacing_m)  # cycles/m
    fx = (np.arange(n) - n // 2) * df
    fxx, fyy = np.meshgrid(fx, fx)
    f = np.hypot(fxx, fyy)
    psd = _phase_psd(f, r0_m)
    psd[n // 2, n // 2] = 0.0
    cn = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) * np.sqrt(psd) * df
    screen = np.real(np.fft.ifft2(np.fft.ifftshift(cn))) * n * n

    if subharmonic_levels > 0:
        coords = (np.arange(n) - n / 2) * spacing_m
        xx, yy = np.meshgrid(coords, coords)
        low = np.zeros((n, n))
        for p in range(1, subharmonic_levels + 1):
            dfp = df / 3.0**p
            fsub = np.array([-1.0, 0.0, 1.0]) * dfp
            sfx, sfy = np.meshgrid(fsub, fsub)
            fmag = np.hypot(sfx, sfy)
            psd_sub = _phase_psd(fmag, r0_m)
            psd_sub[1, 1] = 0.0
            csub = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))) * np.sqrt(psd_sub) * dfp
            for i in range(3):
                for j in range(3):
                    if psd_sub[i, j] == 0.0:
                        continue
                    low += np.real(
                        csub[i, j] * np.exp(2j * np.pi * (sfx[i, j] * xx + sfy[i, j] * yy))
                    )
        low -= low.mean()
        screen = screen + low

    return PhaseScreen(grid=screen, spacing_m=spacing_m, r0_m=r0_m)


def phase_screen_ensemble(
    n: int, spacing_m: float, r0_m: float, seed: int, count: int
) -> list[PhaseScreen]:
    """Independent screens with per-index derived seeds (seed, index)."""
    return [generate_phase_screen(n, spacing_m, r0_m, seed=[seed, i]) for i in range(count)]


def structure_function(
    screens: Sequence[PhaseScreen], separations_m: Iterable[float]
) -> list[float]:
    """Empirical D(r): mean squared phase difference at each separation.

    Averages over positions, both grid orientations, and the ensemble.
    Separations are rounded to whole grid samples and must not exceed half
    the screen extent.
    """
    screens = list(screens)
    if len(screens) < 2:
        raise LeosemError("need at least two screens to estimate the structure function")
    spacing = screens[0].spacing_m
    n = screens[0].grid.shape[0]
    out = []
    for r in separations_m:
        k = int(round(r / spacing))
        if k < 1 or k > n // 2:
            raise LeosemError(f"separation {r:.4g} m is outside (0, half extent]")
        acc = 0.0
        cnt = 0
        for sc in screens:
            g = sc.grid
            dh = g[:, k:] - g[:, :-k]
            dv = g[k:, :] - g[:-k, :]
            acc += float(np.mean(dh * dh)) + float(np.mean(dv * dv))
            cnt += 2
        out.append(acc / cnt)
    return out


def theoretical_structure_function(r_m: float, r0_m: float) -> float:
    return STRUCTURE_COEFF * (r_m / r0_m) ** (5.0 / 3.0)


def apply_turbulence(img: GrayImage, t: TurbulenceParams) -> GrayImage:
    """Long-exposure blur: filter the image with the atmospheric MTF.

    The detector is assumed to sample finely enough that every representable
    spatial frequency lies within the diffraction-limited aperture passband
    (corner of the FFT grid maps to the cutoff D/lambda), so the no-turbulence
    limit is an exact identity; beyond-cutoff frequencies would be zeroed.
    """
    px = img.pixels
    if px.shape[0] != px.shape[1]:
        raise LeosemError("apply_turbulence requires a square image")
    r0 = fried_parameter(t)
    d = t.aperture_m
    n = px.shape[0]
    q = np.fft.fftfreq(n)  # cycles/pixel
    qx, qy = np.meshgrid(q, q)
    qmag = np.hypot(qx, qy)
    q_corner = math.sqrt(2.0) / 2.0
    s = qmag * (d / q_corner)  # lambda * angular frequency, in meters
    h = np.exp(-LONG_EXPOSURE_COEFF * (s / r0) ** (5.0 / 3.0))
    h[s > d * (1 + 1e-12)] = 0.0
    blurred = np.real(np.fft.ifft2(np.fft.fft2(px) * h))
    return GrayImage(pixels=np.clip(blurred, 0.0, 1.0), gsd_m=img.gsd_m)


def mse(a: GrayImage, b: GrayImage) -> float:
    if a.pixels.shape != b.pixels.shape:
        raise LeosemError("image dimensions differ")
    diff = a.pixels - b.pixels
    return float(np.mean(diff * diff))


def ssim(a: GrayImage, b: GrayImage, window: int = 8) -> float:
    """Mean structural similarity over sliding uniform windows.

    Stabilizing constants are (0.01*range)^2 and (0.03*range)^2 with the
    dynamic range fixed at 1.0.
    """
    if a.pixels.shape != b.pixels.shape:
        raise LeosemError("image dimensions differ")
    x, y = a.pixels, b.pixels
    if min(x.shape) < window:
        raise LeosemError(f"image smaller than the {window}x{window} SSIM window")
    c1 = (0.01 * 1.0) ** 2
    c2 = (0.03 * 1.0) ** 2
    npix = window * window

    def winsum(z: np.ndarray) -> np.ndarray:
        c = np.cumsum(np.cumsum(z, axis=0), axis=1)
        c = np.pad(c, ((1, 0), (1, 0)))
        return (
            c[window:, window:] - c[:-window, window:]
            - c[window:, :-window] + c[:-window, :-window]
        )

    mu_x = winsum(x) / npix
    mu_y = winsum(y) / npix
    sxx = winsum(x * x) / npix - mu_x * mu_x
    syy = winsum(y * y) / npix - mu_y * mu_y
    sxy = winsum(x * y) / npix - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * sxy + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (sxx + syy + c2)
    return float(np.mean(num / den))


def recall_from_turbulence(t: TurbulenceParams, curve: Optional[RecallCurve] = None) -> float:
    """Detection recall under the scenario turbulence: logistic decay in D/r0."""
    curve = curve or RecallCurve()
    ratio = t.aperture_m / fried_parameter(t)
    z = curve.steepness * (ratio - curve.midpoint)
    if z > 700.0:
        return 0.0
    return curve.recall_max / (1.0 + math.exp(z))


# --------------------------------------------------------------------------
# PGM image I/O (binary 8-bit, P5)
# --------------------------------------------------------------------------

def read_pgm(path: str) -> GrayImage:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = []
    i = 0
    while len(tokens) < 4:
        if i >= len(data):
            raise LeosemError("truncated PGM header")
        if data[i : i + 1] == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
            continue
        if data[i : i + 1].isspace():
            i += 1
            continue
        j = i
        while j < len(data) and not data[j : j + 1].isspace():
            j += 1
        tokens.append(data[i:j])
        i = j
    if tokens[0] != b"P5":
        raise LeosemError("not a binary PGM (P5) file")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise LeosemError("only 8-bit PGM supported")
    i += 1  # single whitespace after maxval
    raster = np.frombuffer(data[i : i + w * h], dtype=np.uint8)
    if raster.size != w * h:
        raise LeosemError("truncated PGM raster")
    return GrayImage(pixels=raster.reshape(h, w).astype(np.float64) / 255.0)


def write_pgm(img: GrayImage, path: str) -> None:
    px = np.round(np.clip(img.pixels, 0.0, 1.0) * 255.0).astype(np.uint8)
    h, w = px.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(px.tobytes())
