"""Integrand kernels for the proper-time double integrals.

Everything is evaluated in rotated coordinates u = tau + tau', s = tau - tau'
with s > 0, i.e. tau is the later proper time (worldline index i) and tau' the
earlier one (worldline index j).  A kernel call evaluates one batch of
rectangular cells with a tensor Gauss-Legendre rule and returns, per cell,

* the four phase variants exp(i Omega (alpha tau + beta tau')) of the
  integral, ordered (+,+), (+,-), (-,+), (-,-);
* the minimum over nodes of |dt^2 - r^2| / (eps (2 dt + eps)), a proximity
  measure to the regulated light-cone locus;
* a flag marking a sign change of dt^2 - r^2 within the cell.

Two implementations are provided: a numba loop kernel and a vectorized numpy
twin.  Selection happens in :mod:`udw_harvest._accel`.

Pair codes: 0 = AA, 1 = AB, 2 = BA, 3 = BB.  Scenario codes as in
:func:`udw_harvest.geometry.scenario_code`.
"""

import math

import numpy as np

WIGHTMAN_PREFACTOR = -1.0 / (4.0 * math.pi**2)

# below this |z| the series for sinh(z)/z is exact to double precision
_SHC_SMALL = 1e-4


def eval_cells_numpy(cells, xg, wg, scen, pair, a, L, sigma, omega, eps):
    """Vectorized twin of the numba kernel; same math, array ops."""
    n = cells.shape[0]
    g = xg.shape[0]
    u_mid = 0.5 * (cells[:, 0] + cells[:, 1])
    u_half = 0.5 * (cells[:, 1] - cells[:, 0])
    s_mid = 0.5 * (cells[:, 2] + cells[:, 3])
    s_half = 0.5 * (cells[:, 3] - cells[:, 2])

    U = u_mid[:, None, None] + u_half[:, None, None] * xg[None, :, None]
    S = s_mid[:, None, None] + s_half[:, None, None] * xg[None, None, :]
    W2 = wg[None, :, None] * wg[None, None, :]
    # d tau d tau' = du ds / 2
    Wt = W2 * (u_half * s_half * 0.5)[:, None, None]

    tau = 0.5 * (U + S)
    taup = 0.5 * (U - S)

    dt, r2 = _pair_geometry_numpy(U, S, tau, taup, scen, pair, a, L)

    f0 = dt * dt - r2
    denom = (f0 - eps * eps) - 1j * (2.0 * eps * dt)
    wight = WIGHTMAN_PREFACTOR / denom
    gauss = np.exp(-(U * U + S * S) / (4.0 * sigma * sigma))
    base = gauss * wight * Wt

    e1 = np.exp(1j * omega * tau)
    e2 = np.exp(1j * omega * taup)
    vals = np.empty((n, 4), dtype=np.complex128)
    vals[:, 0] = (base * e1 * e2).sum(axis=(1, 2))
    vals[:, 1] = (base * e1 * np.conj(e2)).sum(axis=(1, 2))
    vals[:, 2] = (base * np.conj(e1) * e2).sum(axis=(1, 2))
    vals[:, 3] = (base * np.conj(e1) * np.conj(e2)).sum(axis=(1, 2))

    smooth = eps * (2.0 * np.abs(dt) + eps)
    qmin = (np.abs(f0) / smooth).min(axis=(1, 2))
    sflag = (f0.min(axis=(1, 2)) < 0.0) & (f0.max(axis=(1, 2)) > 0.0)
    return vals, qmin, sflag


def _shc_numpy(z):
    # sinh(z)/z, stable at z -> 0
    small = np.abs(z) < _SHC_SMALL
    zsafe = np.where(small, 1.0, z)
    z2 = z * z
    return np.where(small, 1.0 + z2 / 6.0 + z2 * z2 / 120.0, np.sinh(zsafe) / zsafe)


def _pair_geometry_numpy(U, S, tau, taup, scen, pair, a, L):
    if scen == 0 or a == 0.0:
        dt = S.copy() if isinstance(S, np.ndarray) else S
        if pair == 0 or pair == 3:
            r2 = np.zeros_like(S)
        else:
            r2 = np.full_like(S, L * L)
        return dt, r2

    hu = 0.5 * a * U
    hs = 0.5 * a * S
    shc_s = _shc_numpy(hs)
    dt = S * shc_s * np.cosh(hu)
    if pair == 0 or pair == 3:
        D = 0.5 * a * U * S * _shc_numpy(hu) * shc_s
        if scen == 1:
            return dt, D * D
        # same single hyperbola for AA/BB in every accelerated scenario
        return dt, D * D
    if scen == 1:
        D = 0.5 * a * U * S * _shc_numpy(hu) * shc_s
        dx = (L + D) if pair == 1 else (D - L)
        return dt, dx * dx
    qa = 0.5 * a * tau * tau * _shc_numpy(0.5 * a * tau) ** 2
    qb = 0.5 * a * taup * taup * _shc_numpy(0.5 * a * taup) ** 2
    if scen == 2:
        dx = L + qa + qb
        return dt, dx * dx
    # perpendicular: A along y from the origin, B along x offset by L
    if pair == 1:
        return dt, (L + qb) ** 2 + qa * qa
    return dt, (L + qa) ** 2 + qb * qb


def _make_numba_kernel():
    import numba

    @numba.njit(cache=True)
    def _shc(z):
        if abs(z) < _SHC_SMALL:
            z2 = z * z
            return 1.0 + z2 / 6.0 + z2 * z2 / 120.0
        return math.sinh(z) / z

    @numba.njit(cache=True)
    def eval_cells(cells, xg, wg, scen, pair, a, L, sigma, omega, eps):
        n = cells.shape[0]
        g = xg.shape[0]
        vals = np.zeros((n, 4), dtype=np.complex128)
        qmin = np.empty(n, dtype=np.float64)
        sflag = np.zeros(n, dtype=np.bool_)
        pref = WIGHTMAN_PREFACTOR
        inv4s2 = 1.0 / (4.0 * sigma * sigma)
        for c in range(n):
            u0, u1, s0, s1 = cells[c, 0], cells[c, 1], cells[c, 2], cells[c, 3]
            um = 0.5 * (u0 + u1)
            uh = 0.5 * (u1 - u0)
            sm = 0.5 * (s0 + s1)
            sh = 0.5 * (s1 - s0)
            jac = uh * sh * 0.5
            app = 0.0 + 0.0j
            apm = 0.0 + 0.0j
            amp = 0.0 + 0.0j
            amm = 0.0 + 0.0j
            qbest = 1.0e300
            fneg = False
            fpos = False
            for i in range(g):
                u = um + uh * xg[i]
                wu = wg[i]
                for j in range(g):
                    s = sm + sh * xg[j]
                    w = wu * wg[j] * jac
                    tau = 0.5 * (u + s)
                    taup = 0.5 * (u - s)
                    if scen == 0 or a == 0.0:
                        dt = s
                        if pair == 0 or pair == 3:
                            r2 = 0.0
                        else:
                            r2 = L * L
                    else:
                        hs = 0.5 * a * s
                        shc_s = _shc(hs)
                        dt = s * shc_s * math.cosh(0.5 * a * u)
                        if pair == 0 or pair == 3:
                            D = 0.5 * a * u * s * _shc(0.5 * a * u) * shc_s
                            r2 = D * D
                        elif scen == 1:
                            D = 0.5 * a * u * s * _shc(0.5 * a * u) * shc_s
                            dx = L + D if pair == 1 else D - L
                            r2 = dx * dx
                        else:
                            qa = 0.5 * a * tau * tau * _shc(0.5 * a * tau) ** 2
                            qb = 0.5 * a * taup * taup * _shc(0.5 * a * taup) ** 2
                            if scen == 2:
                                dx = L + qa + qb
                                r2 = dx * dx
                            elif pair == 1:
                                r2 = (L + qb) ** 2 + qa * qa
                            else:
                                r2 = (L + qa) ** 2 + qb * qb
                    f0 = dt * dt - r2
                    if f0 < 0.0:
                        fneg = True
                    elif f0 > 0.0:
                        fpos = True
                    q = abs(f0) / (eps * (2.0 * abs(dt) + eps))
                    if q < qbest:
                        qbest = q
                    denom = complex(f0 - eps * eps, -2.0 * eps * dt)
                    base = w * math.exp(-(u * u + s * s) * inv4s2) * (pref / denom)
                    c1 = math.cos(omega * tau)
                    s1p = math.sin(omega * tau)
                    c2 = math.cos(omega * taup)
                    s2p = math.sin(omega * taup)
                    e1 = complex(c1, s1p)
                    e2 = complex(c2, s2p)
                    app += base * (e1 * e2)
                    apm += base * (e1 * np.conj(e2))
                    amp += base * (np.conj(e1) * e2)
                    amm += base * (np.conj(e1) * np.conj(e2))
            vals[c, 0] = app
            vals[c, 1] = apm
            vals[c, 2] = amp
            vals[c, 3] = amm
            qmin[c] = qbest
            sflag[c] = fneg and fpos
        return vals, qmin, sflag

    return eval_cells
