"""Basis functions of the CEC2021 single-objective suite.

Every function takes ``z`` of shape (n, d), already shifted, scaled and
rotated, and returns shape (n,). All of them attain 0 at ``z = 0``; the
internal offsets (Schwefel's 420.97, Rosenbrock's +1, HGBat's -1) are
applied here so callers only deal with the origin.
"""
import numpy as np

_SCHWEFEL_OFFSET = 4.209687462275036e002
_SCHWEFEL_CONST = 4.189828872724338e002


def bent_cigar(z):
    return z[:, 0] ** 2 + 1e6 * np.sum(z[:, 1:] ** 2, axis=1)


def ellipsoid(z):
    d = z.shape[1]
    if d == 1:
        return z[:, 0] ** 2
    w = 10.0 ** (6.0 * np.arange(d) / (d - 1))
    return np.sum(w * z**2, axis=1)


def discus(z):
    return 1e6 * z[:, 0] ** 2 + np.sum(z[:, 1:] ** 2, axis=1)


def rosenbrock(z):
    z = z + 1.0
    if z.shape[1] == 1:
        return (z[:, 0] - 1.0) ** 2
    a = z[:, :-1] ** 2 - z[:, 1:]
    b = z[:, :-1] - 1.0
    return np.sum(100.0 * a**2 + b**2, axis=1)


def ackley(z):
    d = z.shape[1]
    s1 = -0.2 * np.sqrt(np.sum(z**2, axis=1) / d)
    s2 = np.sum(np.cos(2.0 * np.pi * z), axis=1) / d
    return np.e - 20.0 * np.exp(s1) - np.exp(s2) + 20.0


def griewank(z):
    i = np.sqrt(np.arange(1, z.shape[1] + 1))
    return 1.0 + np.sum(z**2, axis=1) / 4000.0 - np.prod(np.cos(z / i), axis=1)


def rastrigin(z):
    return np.sum(z**2 - 10.0 * np.cos(2.0 * np.pi * z) + 10.0, axis=1)


def schwefel(z):
    """Modified Schwefel with the quadratic penalty outside [-500, 500]."""
    d = z.shape[1]
    y = z + _SCHWEFEL_OFFSET
    hi = y > 500.0
    lo = y < -500.0
    mid = ~(hi | lo)
    t = np.zeros_like(y)
    yh = np.where(hi, y, 0.0)
    m = 500.0 - np.fmod(yh, 500.0)
    t = np.where(hi, -m * np.sin(np.sqrt(np.abs(m))) + ((yh - 500.0) / 100.0) ** 2 / d, t)
    yl = np.where(lo, y, 0.0)
    ml = np.fmod(np.abs(yl), 500.0)
    t = np.where(
        lo,
        -(-500.0 + ml) * np.sin(np.sqrt(np.abs(500.0 - ml))) + ((yl + 500.0) / 100.0) ** 2 / d,
        t,
    )
    t = np.where(mid, -y * np.sin(np.sqrt(np.abs(y))), t)
    return np.sum(t, axis=1) + _SCHWEFEL_CONST * d


def expanded_schaffer_f6(z):
    nxt = np.roll(z, -1, axis=1)
    s = z**2 + nxt**2
    t1 = np.sin(np.sqrt(s)) ** 2
    t2 = 1.0 + 0.001 * s
    return np.sum(0.5 + (t1 - 0.5) / t2**2, axis=1)


def happycat(z):
    d = z.shape[1]
    z = z - 1.0
    r2 = np.sum(z**2, axis=1)
    sz = np.sum(z, axis=1)
    return np.abs(r2 - d) ** 0.25 + (0.5 * r2 + sz) / d + 0.5


def hgbat(z):
    d = z.shape[1]
    z = z - 1.0
    r2 = np.sum(z**2, axis=1)
    sz = np.sum(z, axis=1)
    return np.abs(r2**2 - sz**2) ** 0.5 + (0.5 * r2 + sz) / d + 0.5


def griewank_rosenbrock(z):
    """Expanded Griewank plus Rosenbrock, wrapping the last pair."""
    z = z + 1.0
    nxt = np.roll(z, -1, axis=1)
    t = 100.0 * (z**2 - nxt) ** 2 + (z - 1.0) ** 2
    return np.sum(t**2 / 4000.0 - np.cos(t) + 1.0, axis=1)


def lunacek_bi_rastrigin(x_shifted, shift_sign, rot):
    """Lunacek bi-Rastrigin; needs the un-rotated shifted point and the shift sign.

    ``x_shifted`` is ``(x - o) * 10/100``; the mirror uses the sign of ``o``.
    """
    d = x_shifted.shape[1]
    mu0 = 2.5
    dd = 1.0
    s = 1.0 - 1.0 / (2.0 * np.sqrt(d + 20.0) - 8.2)
    mu1 = -np.sqrt((mu0**2 - dd) / s)
    tmpx = 2.0 * x_shifted
    tmpx = np.where(shift_sign < 0.0, -tmpx, tmpx)
    z = tmpx @ rot.T
    tmpx = tmpx + mu0
    t1 = np.sum((tmpx - mu0) ** 2, axis=1)
    t2 = s * np.sum((tmpx - mu1) ** 2, axis=1) + dd * d
    return np.minimum(t1, t2) + 10.0 * (d - np.sum(np.cos(2.0 * np.pi * z), axis=1))


# name -> (function, input scale applied to x - o)
BASIS = {
    "bent_cigar": (bent_cigar, 1.0),
    "ellipsoid": (ellipsoid, 1.0),
    "discus": (discus, 1.0),
    "rosenbrock": (rosenbrock, 2.048 / 100.0),
    "ackley": (ackley, 1.0),
    "griewank": (griewank, 600.0 / 100.0),
    "rastrigin": (rastrigin, 5.12 / 100.0),
    "schwefel": (schwefel, 1000.0 / 100.0),
    "expanded_schaffer_f6": (expanded_schaffer_f6, 1.0),
    "happycat": (happycat, 5.0 / 100.0),
    "hgbat": (hgbat, 5.0 / 100.0),
    "griewank_rosenbrock": (griewank_rosenbrock, 5.0 / 100.0),
}
