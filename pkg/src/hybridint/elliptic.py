"""Complete and incomplete elliptic integrals and Jacobi elliptic functions.

Everything here uses the *parameter* convention m (not the modulus k = sqrt(m)):

    K(m) = int_0^{pi/2} dt / sqrt(1 - m sin^2 t)
    sn(u|m) = sin(am(u|m)),   F(am(u|m)|m) = u

so that sn(u|0) = sin(u). Only real arguments with 0 <= m < 1 are supported;
m = 1 (the pendulum separatrix) is rejected because K diverges there.
"""

import math

_EPS = 2.220446049250313e-16
_MAX_ITER = 64


def _check_param(m):
    m = float(m)
    if math.isnan(m) or not (0.0 <= m < 1.0):
        raise ValueError(f"elliptic parameter must satisfy 0 <= m < 1, got {m!r}")
    return m


def complete_K(m):
    """Complete elliptic integral of the first kind, K(m) = pi / (2 AGM(1, sqrt(1-m)))."""
    m = _check_param(m)
    a, b = 1.0, math.sqrt(1.0 - m)
    for _ in range(_MAX_ITER):
        if abs(a - b) <= _EPS * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def complete_E(m):
    """Complete elliptic integral of the second kind via the AGM sequence.

    E(m) = K(m) * (1 - sum_n 2^(n-1) c_n^2) with c_0^2 = m and
    c_{n+1} = (a_n - b_n) / 2.
    """
    m = _check_param(m)
    a, b = 1.0, math.sqrt(1.0 - m)
    total = 0.5 * m
    weight = 1.0
    for _ in range(_MAX_ITER):
        if abs(a - b) <= _EPS * a:
            break
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        total += weight * c * c
        weight *= 2.0
    return math.pi / (2.0 * a) * (1.0 - total)


def carlson_rf(x, y, z):
    """Carlson's symmetric integral R_F(x, y, z) for non-negative arguments.

    At most one argument may be zero. Duplication runs until the truncated
    Taylor series is accurate to double precision.
    """
    if min(x, y, z) < 0.0 or (x == 0.0) + (y == 0.0) + (z == 0.0) > 1:
        raise ValueError("carlson_rf needs non-negative arguments, at most one zero")
    x0, y0 = x, y
    a0 = (x + y + z) / 3.0
    q = (3.0 * _EPS) ** (-1.0 / 8.0) * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    a = a0
    scale = 1.0
    for _ in range(_MAX_ITER):
        if q * scale < abs(a):
            break
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
        a = 0.25 * (a + lam)
        scale *= 0.25
    X = (a0 - x0) * scale / a
    Y = (a0 - y0) * scale / a
    Z = -(X + Y)
    e2 = X * Y - Z * Z
    e3 = X * Y * Z
    series = (
        1.0
        - e2 / 10.0
        + e3 / 14.0
        + e2 * e2 / 24.0
        - 3.0 * e2 * e3 / 44.0
        - 5.0 * e2**3 / 208.0
        + 3.0 * e3 * e3 / 104.0
        + e2 * e2 * e3 / 16.0
    )
    return series / math.sqrt(a)


def incomplete_F(phi, m):
    """Incomplete integral of the first kind F(phi|m) for |phi| <= pi/2.

    Computed as sin(phi) * R_F(cos^2 phi, 1 - m sin^2 phi, 1).
    """
    m = _check_param(m)
    phi = float(phi)
    if not abs(phi) <= 0.5 * math.pi * (1.0 + 4 * _EPS):
        raise ValueError(f"incomplete_F needs |phi| <= pi/2, got {phi!r}")
    phi = max(-0.5 * math.pi, min(0.5 * math.pi, phi))
    if phi == 0.0:
        return 0.0
    s = math.sin(phi)
    c = math.cos(phi)
    if abs(phi) == 0.5 * math.pi:
        return math.copysign(complete_K(m), phi)
    return s * carlson_rf(c * c, 1.0 - m * s * s, 1.0)


def inverse_amplitude(phi, m):
    """F(phi|m) continued to every real amplitude phi (the inverse of am(.|m)).

    Uses F(phi + j*pi) = F(phi) + 2 j K(m).
    """
    m = _check_param(m)
    phi = float(phi)
    j = round(phi / math.pi)
    rest = phi - j * math.pi
    return incomplete_F(rest, m) + 2.0 * j * complete_K(m)


def jacobi_sn_cn_dn(u, m):
    """Jacobi elliptic functions (sn, cn, dn) of real u at parameter m.

    Descending AGM (Landen) sequence followed by the backward recursion
    phi_{n-1} = (phi_n + arcsin(c_n/a_n sin phi_n)) / 2. The argument is
    first reduced modulo the real period 4K(m).
    """
    m = _check_param(m)
    u = float(u)
    if not math.isfinite(u):
        raise ValueError(f"jacobi_sn_cn_dn needs a finite argument, got {u!r}")
    if m == 0.0:
        return math.sin(u), math.cos(u), 1.0

    period = 4.0 * complete_K(m)
    u = u - period * round(u / period)

    a = [1.0]
    c = [math.sqrt(m)]
    b = math.sqrt(1.0 - m)
    for _ in range(_MAX_ITER):
        if abs(c[-1]) <= _EPS * a[-1]:
            break
        an, bn = a[-1], b
        a.append(0.5 * (an + bn))
        c.append(0.5 * (an - bn))
        b = math.sqrt(an * bn)
    n = len(a) - 1
    phi = (2.0**n) * a[n] * u
    for i in range(n, 0, -1):
        phi = 0.5 * (phi + math.asin(c[i] / a[i] * math.sin(phi)))
    sn = math.sin(phi)
    cn = math.cos(phi)
    # cos(phi_0)/cos(phi_1 - phi_0) is 0/0 at u = K; dn > 0 for m < 1.
    dn = math.sqrt(1.0 - m * sn * sn)
    return sn, cn, dn
