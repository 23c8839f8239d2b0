"""Field two-point functions and the second-order detector correlators.

The massless-field Wightman function along a pair of worldlines is integrated
against Gaussian switching and detector phases,

    N[ij, ab] = integral over tau > tau' of
        exp(-(tau^2 + tau'^2)/(2 sigma^2))
        * exp(i Omega (alpha tau + beta tau'))
        * W(x_i(tau), x_j(tau'))  d tau d tau'

with tau the later proper time.  These sixteen ordered building blocks give
every correlator used downstream:

* ``plain``  unordered double integrals, first Wightman slot carrying the
  bra-side label:  plain[ij, ab] = N[ij, ab] + conj(N[ji, -b, -a]).
* the exchange amplitude M, which needs the anti-time-ordered two-point
  function (earlier argument first):  M = -(conj N[AB,++] + conj N[BA,++]).
  The unordered prescription loses M's imaginary part entirely; the ordered
  one reproduces the inertial closed form.

Every stored value carries the lambda^2 coupling prefactor.  The regulator
is evaluated on a decreasing schedule and polynomially extrapolated to zero;
only regulator-finite combinations are ever extrapolated (the ordered
same-detector integrals alone carry a 1/eps imaginary part that cancels in
all of the combinations above).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Scenario, scenario_code, separation
from .quadrature import adaptive_quartet, extrapolate_to_zero

__all__ = [
    "DetectorParams",
    "QuadratureConfig",
    "CorrelatorSet",
    "QuadratureError",
    "wightman",
    "wightman_inertial_distributional",
    "correlator",
    "correlator_set",
    "inertial_closed_forms",
    "erfi",
]

_DETS = ("A", "B")
_PAIR_CODE = {("A", "A"): 0, ("A", "B"): 1, ("B", "A"): 2, ("B", "B"): 3}
# quartet component order used by the kernels: (+,+), (+,-), (-,+), (-,-)
_PLUS, _MINUS = 0, 1


class QuadratureError(RuntimeError):
    """Raised when the panel budget is exhausted before convergence."""

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class DetectorParams:
    """Detector gap, coupling strength and Gaussian switching width."""

    omega: float
    lam: float
    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0.0):
            raise ValueError("sigma must be > 0")
        if not (self.lam > 0.0):
            raise ValueError("lambda must be > 0")
        if self.omega < 0.0:
            raise ValueError("omega must be >= 0")


@dataclass(frozen=True)
class QuadratureConfig:
    window: float = 6.0
    base_panels: int = 12
    rel_tol: float = 1e-5
    eps_schedule: tuple = (0.1, 0.05, 0.025, 0.0125)
    extrapolation_order: int = 3
    gl_order: int = 8
    max_depth: int = 18
    max_cells: int = 400_000

    def __post_init__(self):
        if self.window < 4.0:
            raise ValueError("window must be >= 4 switching widths")
        if not (self.rel_tol > 0.0):
            raise ValueError("rel_tol must be > 0")
        sched = tuple(self.eps_schedule)
        if len(sched) < 2 or any(e <= 0 for e in sched):
            raise ValueError("eps_schedule must hold positive values")
        if any(b >= a for a, b in zip(sched, sched[1:])):
            raise ValueError("eps_schedule must decrease strictly")


def wightman(p, q, eps):
    """Regulated vacuum two-point function of the massless field,
    -(1/4 pi^2) / ((dt - i eps)^2 - |dx|^2)."""
    if not (eps > 0.0):
        raise ValueError("regulator eps must be > 0")
    dt, r2 = separation(p, q)
    return -1.0 / (4.0 * math.pi**2) / ((dt - 1j * eps) ** 2 - r2)


def wightman_inertial_distributional(dt, L):
    """Distributional split of the inertial Wightman function.

    For static detectors at distance L the two-point function along the pair
    is  delta_part / i * delta(f) + pv_part  with f = dt^2 - L^2,
    delta_part = sgn(dt)/(4 pi) and pv_part = -1/(4 pi^2 f).  The delta
    support (f = 0) must be handled by the caller as a line integral.
    """
    if not (L > 0.0):
        raise ValueError("L must be > 0")
    f = dt * dt - L * L
    if f == 0.0:
        raise ValueError("on the light cone; route the delta term separately")
    delta_part = math.copysign(1.0, dt) / (4.0 * math.pi) if dt != 0.0 else 0.0
    pv_part = -1.0 / (4.0 * math.pi**2 * f)
    return delta_part, pv_part


def erfi(x):
    """Imaginary error function erf(ix)/i for real x, accurate to ~1e-12.

    Power series up to |x| = 5 (all terms positive, no cancellation), then the
    asymptotic expansion exp(x^2)/(x sqrt(pi)) * sum (2k-1)!!/(2x^2)^k, whose
    smallest term is below 1e-12 for |x| > 5.
    """
    if x == 0.0:
        return 0.0
    ax = abs(x)
    if ax <= 5.0:
        term = ax
        total = ax
        k = 0
        while True:
            k += 1
            term *= ax * ax / k
            inc = term / (2 * k + 1)
            total += inc
            if inc < 1e-17 * total:
                break
        val = 2.0 / math.sqrt(math.pi) * total
    else:
        x2 = ax * ax
        term = 1.0
        total = 1.0
        for k in range(1, 40):
            nxt = term * (2 * k - 1) / (2.0 * x2)
            if nxt >= term:  # past the smallest term
                break
            term = nxt
            total += term
            if term < 1e-17 * total:
                break
        val = math.exp(x2) / (ax * math.sqrt(math.pi)) * total
    return math.copysign(val, x)


def inertial_closed_forms(dparams, L):
    """Closed-form transition probability |E|^2 and exchange amplitude M for
    inertial detectors at separation L with Gaussian switching."""
    if not (L > 0.0):
        raise ValueError("L must be > 0")
    lam, om, sg = dparams.lam, dparams.omega, dparams.sigma
    so = sg * om
    e2 = lam**2 / (4.0 * math.pi) * (
        math.exp(-(so**2)) - math.sqrt(math.pi) * so * math.erfc(so)
    )
    # erf(i y) = i erfi(y)
    y = L / (2.0 * sg)
    m = (
        1j
        * lam**2
        * sg
        / (4.0 * math.sqrt(math.pi) * L)
        * math.exp(-(so**2) - y * y)
        * (1j * erfi(y) - 1.0)
    )
    return e2, m


@dataclass
class CorrelatorSet:
    """All second-order field correlators for one parameter point.

    ``plain16[i, j, ia, ib]`` aligns with the bra-ket labels: index 0 is the
    ``+`` phase and 1 the ``-`` phase, the first label pair being the bra
    side.  ``cross_ordered[p, ia, ib]`` stores the ordered (later-first)
    cross-detector integrals, p = 0 for AB and 1 for BA; they feed the
    exchange part of the second-order map.  All entries carry lambda^2.
    """

    PA: float
    PB: float
    M: complex
    XAB: complex
    Mp: complex
    Mpp: complex
    Cc: complex
    Cp: complex
    GAA: complex
    GBB: complex
    rho44: float
    lam: float
    plain16: np.ndarray = field(repr=False)
    cross_ordered: np.ndarray = field(repr=False)
    error_estimate: float = 0.0
    converged: bool = True

    def plain(self, i, alpha, j, beta):
        """Unordered correlator carrying the bra-ket label (i, alpha | j, beta)."""
        ii, jj = _DETS.index(i), _DETS.index(j)
        return self.plain16[ii, jj, _sgn_idx(alpha), _sgn_idx(beta)]

    def kmap(self, i, alpha, j, beta):
        """Coefficient of sigma_i^alpha rho sigma_j^beta in the second-order map."""
        return self.plain(j, beta, i, alpha)

    def with_coupling(self, lam):
        """Exact rescaling to a different coupling strength (everything is
        proportional to lambda^2)."""
        f = (lam / self.lam) ** 2
        return CorrelatorSet(
            PA=self.PA * f,
            PB=self.PB * f,
            M=self.M * f,
            XAB=self.XAB * f,
            Mp=self.Mp * f,
            Mpp=self.Mpp * f,
            Cc=self.Cc * f,
            Cp=self.Cp * f,
            GAA=self.GAA * f,
            GBB=self.GBB * f,
            rho44=abs(self.M * f) ** 2
            + abs(self.XAB * f) ** 2
            + (self.PA * f) * (self.PB * f),
            lam=lam,
            plain16=self.plain16 * f,
            cross_ordered=self.cross_ordered * f,
            error_estimate=self.error_estimate,
            converged=self.converged,
        )

    @classmethod
    def zero(cls, lam=0.1):
        return cls(
            PA=0.0,
            PB=0.0,
            M=0.0j,
            XAB=0.0j,
            Mp=0.0j,
            Mpp=0.0j,
            Cc=0.0j,
            Cp=0.0j,
            GAA=0.0j,
            GBB=0.0j,
            rho44=0.0,
            lam=lam,
            plain16=np.zeros((2, 2, 2, 2), dtype=np.complex128),
            cross_ordered=np.zeros((2, 2, 2), dtype=np.complex128),
        )


def _sgn_idx(alpha):
    if alpha in (1, +1, "+"):
        return _PLUS
    if alpha in (-1, "-"):
        return _MINUS
    raise ValueError(f"phase label must be +-1 or '+'/'-', got {alpha!r}")


def _flip(idx):
    return 1 - idx


def _ordered_tables(scenario, tparams, dparams, qcfg, pairs):
    """Regulated ordered quartets N[pair][i_eps] plus per-pass errors."""
    scen = scenario_code(scenario)
    eps_abs = [e * dparams.sigma for e in qcfg.eps_schedule]
    tables = {}
    errors = {}
    all_converged = True
    for pair in pairs:
        code = _PAIR_CODE[pair]
        vals = np.empty((len(eps_abs), 4), dtype=np.complex128)
        errs = np.empty(len(eps_abs))
        for k, eps in enumerate(eps_abs):
            res = adaptive_quartet(
                scen, code, tparams.a, tparams.L, dparams.sigma, dparams.omega, eps, qcfg
            )
            vals[k] = res.values
            errs[k] = res.error
            all_converged &= res.converged
        tables[pair] = vals
        errors[pair] = errs
    return tables, errors, all_converged


def _plain_per_eps(tables, i, j, ia, ib):
    # plain[ij,ab](eps) = N[ij,ab](eps) + conj(N[ji,-b,-a](eps))
    n_ij = tables[(i, j)][:, 2 * ia + ib]
    n_ji = tables[(j, i)][:, 2 * _flip(ib) + _flip(ia)]
    return n_ij + np.conj(n_ji)


def correlator(i, alpha, j, beta, scenario, tparams, dparams, qcfg=None):
    """One unordered correlator with the bra-ket label (i, alpha | j, beta),
    extrapolated to zero regulator.  Carries the lambda^2 prefactor.

    Raises :class:`QuadratureError` when the panel budget did not converge.
    """
    qcfg = qcfg or QuadratureConfig()
    ia, ib = _sgn_idx(alpha), _sgn_idx(beta)
    pairs = {(i, j), (j, i)}
    tables, errors, ok = _ordered_tables(scenario, tparams, dparams, qcfg, pairs)
    per_eps = _plain_per_eps(tables, i, j, ia, ib)
    value, weights = extrapolate_to_zero(
        qcfg.eps_schedule, per_eps, qcfg.extrapolation_order
    )
    value = value * dparams.lam**2
    quad_err = sum(
        float(np.abs(weights) @ (errors[p])) for p in pairs
    ) * dparams.lam**2
    est = quad_err / max(abs(value), 1e-300)
    if not ok:
        raise QuadratureError(
            "panel budget exhausted before convergence",
            value=value,
            error_estimate=est,
        )
    return value


def correlator_set(scenario, tparams, dparams, qcfg=None):
    """All correlators for one (scenario, trajectory, detector) point.

    Never raises on slow convergence; inspect ``converged`` and
    ``error_estimate`` instead (the sweep runner records them per row).
    """
    qcfg = qcfg or QuadratureConfig()
    pairs = [("A", "A"), ("A", "B"), ("B", "A"), ("B", "B")]
    tables, errors, ok = _ordered_tables(scenario, tparams, dparams, qcfg, pairs)
    lam2 = dparams.lam**2
    order = qcfg.extrapolation_order
    sched = qcfg.eps_schedule

    plain16 = np.empty((2, 2, 2, 2), dtype=np.complex128)
    weights = None
    for ii, i in enumerate(_DETS):
        for jj, j in enumerate(_DETS):
            for ia in (0, 1):
                for ib in (0, 1):
                    per_eps = _plain_per_eps(tables, i, j, ia, ib)
                    val, weights = extrapolate_to_zero(sched, per_eps, order)
                    plain16[ii, jj, ia, ib] = val * lam2

    cross_per_eps = np.stack([tables[("A", "B")], tables[("B", "A")]], axis=1)
    cross_val, _ = extrapolate_to_zero(sched, cross_per_eps, order)
    cross_ordered = (cross_val * lam2).reshape(2, 2, 2)

    # exchange amplitude: anti-time-ordered prescription
    m_per_eps = -(
        np.conj(tables[("A", "B")][:, 0]) + np.conj(tables[("B", "A")][:, 0])
    )
    M, _ = extrapolate_to_zero(sched, m_per_eps, order)
    M = complex(M * lam2)

    PA = float(np.real(plain16[0, 0, _MINUS, _PLUS]))
    PB = float(np.real(plain16[1, 1, _MINUS, _PLUS]))
    XAB = complex(plain16[0, 1, _MINUS, _PLUS])
    Mp = (plain16[0, 1, _MINUS, _MINUS] + plain16[1, 0, _PLUS, _PLUS]) / 2.0
    Mpp = (plain16[0, 1, _PLUS, _PLUS] + plain16[1, 0, _MINUS, _MINUS]) / 2.0
    Cc = plain16[0, 1, _MINUS, _PLUS] + plain16[1, 0, _PLUS, _MINUS]
    GAA = complex(plain16[0, 0, _MINUS, _MINUS])
    GBB = complex(plain16[1, 1, _MINUS, _MINUS])
    Cp = GAA + complex(plain16[1, 1, _PLUS, _PLUS])

    # error estimate: quadrature errors pushed through the extrapolation
    # weights, relative to the largest correlator magnitude
    werr = float(np.abs(weights) @ sum(errors[tuple(p)] for p in pairs)) * lam2
    scale = max(PA, PB, abs(M), abs(XAB), 1e-300)
    est = werr / scale

    return CorrelatorSet(
        PA=PA,
        PB=PB,
        M=M,
        XAB=XAB,
        Mp=complex(Mp),
        Mpp=complex(Mpp),
        Cc=complex(Cc),
        Cp=complex(Cp),
        GAA=GAA,
        GBB=GBB,
        rho44=abs(M) ** 2 + abs(XAB) ** 2 + PA * PB,
        lam=dparams.lam,
        plain16=plain16,
        cross_ordered=cross_ordered,
        error_estimate=est,
        converged=ok,
    )
