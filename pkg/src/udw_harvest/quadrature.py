"""Adaptive tensor-product Gauss-Legendre quadrature for the ordered
double integrals, plus the regulator extrapolation.

The integration domain is the rotated rectangle u in [-c, c], s in [0, c]
with c = sqrt(2) * window * sigma, which contains the proper-time square
|tau|, |tau'| <= window * sigma up to Gaussian-tail corners of relative size
exp(-window^2).  Cells are bisected in both directions until the embedded
parent-vs-children estimate meets the local tolerance; cells straddling the
regulated light-cone locus are refined down to a fraction of the regulator
scale before they may be accepted.
"""

import numpy as np

from ._accel import eval_cells

__all__ = ["adaptive_quartet", "extrapolate_to_zero", "QuartetResult"]

# force-refine while |dt^2 - r^2| < Q_THRESH * eps * (2 dt + eps) somewhere
Q_THRESH = 3.0
# smallest cell extent relative to the regulator
RES_FACTOR = 0.5
# share of the error budget granted to the quadrature (rest: extrapolation)
PASS_TOL_FRACTION = 0.25

_leggauss_cache = {}


def _leggauss(n):
    if n not in _leggauss_cache:
        _leggauss_cache[n] = np.polynomial.legendre.leggauss(n)
    return _leggauss_cache[n]


class QuartetResult:
    """Four phase-variant integrals of one ordered pair at fixed regulator."""

    __slots__ = ("values", "error", "ncells", "converged")

    def __init__(self, values, error, ncells, converged):
        self.values = values
        self.error = error
        self.ncells = ncells
        self.converged = converged


def _split4(cells):
    um = 0.5 * (cells[:, 0] + cells[:, 1])
    sm = 0.5 * (cells[:, 2] + cells[:, 3])
    n = cells.shape[0]
    out = np.empty((4 * n, 4))
    out[0::4] = np.column_stack([cells[:, 0], um, cells[:, 2], sm])
    out[1::4] = np.column_stack([um, cells[:, 1], cells[:, 2], sm])
    out[2::4] = np.column_stack([cells[:, 0], um, sm, cells[:, 3]])
    out[3::4] = np.column_stack([um, cells[:, 1], sm, cells[:, 3]])
    return out


def adaptive_quartet(scen, pair, a, L, sigma, omega, eps_abs, cfg):
    """Integrate one (scenario, ordered pair) at one regulator value.

    Returns a :class:`QuartetResult` whose ``values`` follow the kernel's
    phase ordering (+,+), (+,-), (-,+), (-,-).
    """
    c = np.sqrt(2.0) * cfg.window * sigma
    xg, wg = _leggauss(cfg.gl_order)

    nu = cfg.base_panels
    ns = max(cfg.base_panels // 2, 4)
    ue = np.linspace(-c, c, nu + 1)
    se = np.linspace(0.0, c, ns + 1)
    cells = np.array(
        [[ue[i], ue[i + 1], se[j], se[j + 1]] for i in range(nu) for j in range(ns)]
    )
    domain_area = 2.0 * c * c
    min_size = RES_FACTOR * eps_abs
    tol_rel = cfg.rel_tol * PASS_TOL_FRACTION

    vals, _, _ = eval_cells(cells, xg, wg, scen, pair, a, L, sigma, omega, eps_abs)
    work_cells = cells
    work_vals = vals
    accepted = np.zeros(4, dtype=np.complex128)
    accepted_err = 0.0
    total_cells = work_cells.shape[0]
    converged = True

    for _ in range(cfg.max_depth):
        if work_cells.shape[0] == 0:
            break
        children = _split4(work_cells)
        cvals, cqmin, csflag = eval_cells(
            children, xg, wg, scen, pair, a, L, sigma, omega, eps_abs
        )
        total_cells += children.shape[0]
        npar = work_cells.shape[0]
        child_sums = cvals.reshape(npar, 4, 4).sum(axis=1)
        est = np.abs(work_vals - child_sums).max(axis=1)

        scale = max(
            np.abs(accepted + child_sums.sum(axis=0)).max(), 1e-30
        )
        tol_abs = tol_rel * scale
        area = (work_cells[:, 1] - work_cells[:, 0]) * (
            work_cells[:, 3] - work_cells[:, 2]
        )
        tol_cell = tol_abs * np.maximum(area / domain_area, 1e-4)

        child_size = np.maximum(
            children[:, 1] - children[:, 0], children[:, 3] - children[:, 2]
        )
        near_locus = (cqmin < Q_THRESH) | csflag
        force_child = near_locus & (child_size > min_size)
        force = force_child.reshape(npar, 4).any(axis=1)

        done = (est <= tol_cell) & ~force
        if work_cells.shape[0] * 4 + total_cells > cfg.max_cells:
            # budget exhausted: accept everything with its current estimate
            accepted += child_sums.sum(axis=0)
            accepted_err += est.sum()
            converged = False
            work_cells = np.empty((0, 4))
            break
        accepted += child_sums[done].sum(axis=0)
        accepted_err += 0.5 * est[done].sum()
        keep = ~done
        idx = np.repeat(keep, 4)
        work_cells = children[idx]
        work_vals = cvals[idx]
    else:
        # depth cap: accept leftovers
        if work_cells.shape[0]:
            accepted += work_vals.sum(axis=0)
            accepted_err += np.abs(work_vals).max(axis=1).sum() * 0.1
            converged = False

    if work_cells.shape[0] and converged:
        accepted += work_vals.sum(axis=0)

    return QuartetResult(accepted, accepted_err, total_cells, converged)


def extrapolate_to_zero(eps_values, samples, order):
    """Polynomial least-squares extrapolation of regulated integrals to eps=0.

    samples has shape (n_eps, ...) complex.  Returns (value_at_zero, weights)
    where weights are the effective linear-combination coefficients, used by
    callers to propagate per-sample quadrature errors.
    """
    eps_values = np.asarray(eps_values, dtype=float)
    n = eps_values.size
    order = min(order, n - 1)
    V = np.vander(eps_values, order + 1)
    # value at eps=0 is the constant coefficient: a linear functional of samples
    pinv = np.linalg.pinv(V)
    weights = pinv[-1]
    samples = np.asarray(samples)
    value = np.tensordot(weights, samples, axes=(0, 0))
    return value, weights
