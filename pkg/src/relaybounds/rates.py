"""Closed-form mutual-information terms, cut-set bounds, and water-filling.

Every rate here is in bits (log base 2 at the surface, natural logs inside).
The transmit message splits into a relay-decoded part u and a direct part v;
x1 = u + v under superposition, x1 = x1' + v under dirty-paper precoding.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .channel import RelayChannel
from .linalg import (LN2, as_cmatrix, hermitize, logdet_id_nats,
                     schur_conditional_cov)

STRATEGIES = ("sc_u_first", "sc_v_first", "pre_u_first", "pre_v_first")

#: absolute trace-budget slack on profile validation
BUDGET_TOL = 1e-9


@dataclass(frozen=True)
class CovarianceProfile:
    """One transmit-side strategy instance.

    sigma_u / sigma_v are the covariances of the two message components
    (Mt-dim), sigma_x2 the relay transmit covariance (Mr-dim), cross_ux2 the
    cooperation cross-covariance E(u x2^H).  For precoding profiles,
    sigma_x1p_given_x2 is the conditional covariance of the non-cooperative
    transmit component given the relay signal; when absent it is derived from
    the joint block matrix.
    """

    sigma_u: np.ndarray
    sigma_v: np.ndarray
    sigma_x2: np.ndarray
    cross_ux2: np.ndarray
    sigma_x1p_given_x2: np.ndarray | None = None

    def joint(self) -> np.ndarray:
        """Stacked covariance [[sigma_u, cross], [cross^H, sigma_x2]]."""
        su = as_cmatrix(self.sigma_u)
        sx = as_cmatrix(self.sigma_x2)
        g = as_cmatrix(self.cross_ux2)
        top = np.hstack([su, g])
        bot = np.hstack([g.conj().T, sx])
        return np.vstack([top, bot])

    def cond_u_cov(self) -> np.ndarray:
        """Conditional covariance of u given x2 (Schur complement)."""
        if float(np.max(np.abs(self.cross_ux2))) == 0.0:
            return hermitize(self.sigma_u)
        return schur_conditional_cov(self.joint(), as_cmatrix(self.sigma_u).shape[0])

    def x1p_cond_cov(self) -> np.ndarray:
        if self.sigma_x1p_given_x2 is not None:
            return as_cmatrix(self.sigma_x1p_given_x2)
        return self.cond_u_cov()

    def validate(self, mt_budget: float, mr_budget: float) -> None:
        """Check PSD structure and the two power budgets; raise on violation."""
        from .linalg import check_hermitian_psd
        check_hermitian_psd(self.joint(), herm_tol=1e-9)
        check_hermitian_psd(self.sigma_v, herm_tol=1e-9)
        tu = float(np.real(np.trace(as_cmatrix(self.sigma_u))))
        tv = float(np.real(np.trace(as_cmatrix(self.sigma_v))))
        tx = float(np.real(np.trace(as_cmatrix(self.sigma_x2))))
        if tu + tv > mt_budget + BUDGET_TOL:
            raise ValueError(f"transmit power {tu + tv:.12g} exceeds {mt_budget}")
        if tx > mr_budget + BUDGET_TOL:
            raise ValueError(f"relay power {tx:.12g} exceeds {mr_budget}")


@dataclass(frozen=True)
class RateBreakdown:
    """Per-link terms and the assembled rate for one strategy/decode order."""

    r_relay_link: float
    r_mac: float
    r_direct: float
    r_u: float
    r_total: float
    strategy: str


@dataclass(frozen=True)
class UpperBoundVars:
    """Decision variables of the cut-set upper bound."""

    rho: float
    sigma11: np.ndarray
    sigma22: np.ndarray


def _bab(ch: RelayChannel, p: CovarianceProfile) -> np.ndarray:
    """B A B^H with B = [sqrt(g2) H2, sqrt(g3) H3] and A the joint covariance."""
    b = np.hstack([np.sqrt(ch.gamma2) * ch.H2, np.sqrt(ch.gamma3) * ch.H3])
    return hermitize(b @ p.joint() @ b.conj().T)


def _h2v(ch: RelayChannel, p: CovarianceProfile) -> np.ndarray:
    return hermitize(ch.gamma2 * ch.H2 @ as_cmatrix(p.sigma_v) @ ch.H2.conj().T)


def mi_relay_link_sc(ch: RelayChannel, p: CovarianceProfile) -> float:
    """I(U; Y1 | X2) under superposition: v acts as interference at the relay."""
    h1 = ch.H1
    cond = p.cond_u_cov()
    num = ch.gamma1 * h1 @ (cond + as_cmatrix(p.sigma_v)) @ h1.conj().T
    den = ch.gamma1 * h1 @ as_cmatrix(p.sigma_v) @ h1.conj().T
    return (logdet_id_nats(num) - logdet_id_nats(den)) / LN2


def mi_relay_link_dpc(ch: RelayChannel, p: CovarianceProfile) -> float:
    """Interference-free relay-link rate under dirty-paper precoding."""
    h1 = ch.H1
    m = ch.gamma1 * h1 @ p.x1p_cond_cov() @ h1.conj().T
    return logdet_id_nats(m) / LN2


def mi_mac(ch: RelayChannel, p: CovarianceProfile) -> float:
    """I(U, X2; Y): cooperative pair over the effective MAC, v undecoded."""
    nv = _h2v(ch, p)
    return (logdet_id_nats(nv + _bab(ch, p)) - logdet_id_nats(nv)) / LN2


def mi_direct_given(ch: RelayChannel, p: CovarianceProfile) -> float:
    """I(V; Y | U, X2): direct message after the cooperative pair is stripped."""
    return logdet_id_nats(_h2v(ch, p)) / LN2


def mi_v_unconditional(ch: RelayChannel, p: CovarianceProfile) -> float:
    """I(V; Y): direct message decoded first, cooperation as interference."""
    bab = _bab(ch, p)
    return (logdet_id_nats(_h2v(ch, p) + bab) - logdet_id_nats(bab)) / LN2


def mi_mac_given_v(ch: RelayChannel, p: CovarianceProfile) -> float:
    """I(U, X2; Y | V): cooperative pair after the direct message is stripped."""
    return logdet_id_nats(_bab(ch, p)) / LN2


def achievable_rate(ch: RelayChannel, p: CovarianceProfile,
                    strategy: str) -> RateBreakdown:
    """Assemble min(relay-link, MAC) + direct for the requested strategy."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy.startswith("pre"):
        relay = mi_relay_link_dpc(ch, p)
    else:
        relay = mi_relay_link_sc(ch, p)
    if strategy.endswith("u_first"):
        mac = mi_mac(ch, p)
        direct = mi_direct_given(ch, p)
    else:
        mac = mi_mac_given_v(ch, p)
        direct = mi_v_unconditional(ch, p)
    relay = max(0.0, relay)
    mac = max(0.0, mac)
    direct = max(0.0, direct)
    r_u = min(relay, mac)
    return RateBreakdown(r_relay_link=relay, r_mac=mac, r_direct=direct,
                         r_u=r_u, r_total=r_u + direct, strategy=strategy)


# ---------------------------------------------------------------------------
# Cut-set upper bound pieces
# ---------------------------------------------------------------------------

def cutset_broadcast_term(ch: RelayChannel, v: UpperBoundVars) -> float:
    """Broadcast-cut rate: stacked (relay, receiver) channel, correlation loss."""
    g = np.vstack([np.sqrt(ch.gamma1) * ch.H1, np.sqrt(ch.gamma2) * ch.H2])
    m = (1.0 - v.rho ** 2) * g @ as_cmatrix(v.sigma11) @ g.conj().T
    return logdet_id_nats(m) / LN2


#: golden-section bracket for the MAC-cut inner infimum, in log10(a) decades
INNER_INF_BRACKET = (-6.0, 6.0)
INNER_INF_TOL = 1e-6
_INNER_SCAN_POINTS = 65
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def cutset_inner_inf(ch: RelayChannel, v: UpperBoundVars) -> float:
    """MAC-cut rate: infimum over the coupling constant a > 0.

    Coarse log-spaced scan then golden-section refinement to |dlog10 a| < 1e-6;
    a minimum pinned at a bracket edge is returned with a warning.
    """
    h2s = hermitize(ch.H2 @ as_cmatrix(v.sigma11) @ ch.H2.conj().T)
    h3s = hermitize(ch.H3 @ as_cmatrix(v.sigma22) @ ch.H3.conj().T)
    rho2 = v.rho ** 2
    c23 = np.sqrt(ch.gamma2 * ch.gamma3)
    nt = ch.Nt

    if nt == 1:
        p = float(np.real(h2s[0, 0]))
        q = float(np.real(h3s[0, 0]))

        def val(la: float) -> float:
            a = 10.0 ** la
            return math.log1p((ch.gamma2 + rho2 / a * c23) * p
                              + (ch.gamma3 + a * c23) * q) / LN2
    else:
        def val(la: float) -> float:
            a = 10.0 ** la
            m = (ch.gamma2 + rho2 / a * c23) * h2s + (ch.gamma3 + a * c23) * h3s
            return logdet_id_nats(m) / LN2

    lo, hi = INNER_INF_BRACKET
    if nt == 1:
        # Scalar MAC cut is unimodal in log a: golden-section on the full
        # bracket directly.
        a_lo, a_hi = lo, hi
        edge_val = min(val(lo), val(hi))
    else:
        grid = np.linspace(lo, hi, _INNER_SCAN_POINTS)
        vals = [val(x) for x in grid]
        i = int(np.argmin(vals))
        a_lo = grid[max(i - 1, 0)]
        a_hi = grid[min(i + 1, _INNER_SCAN_POINTS - 1)]
        edge_val = vals[i]
    # Golden-section search on log10(a).
    x1 = a_hi - _GOLDEN * (a_hi - a_lo)
    x2 = a_lo + _GOLDEN * (a_hi - a_lo)
    f1, f2 = val(x1), val(x2)
    while a_hi - a_lo > INNER_INF_TOL:
        if f1 <= f2:
            a_hi, x2, f2 = x2, x1, f1
            x1 = a_hi - _GOLDEN * (a_hi - a_lo)
            f1 = val(x1)
        else:
            a_lo, x1, f1 = x1, x2, f2
            x2 = a_lo + _GOLDEN * (a_hi - a_lo)
            f2 = val(x2)
    mid = 0.5 * (a_lo + a_hi)
    if mid - lo < 10 * INNER_INF_TOL or hi - mid < 10 * INNER_INF_TOL:
        warnings.warn("inner infimum attained at the bracket edge",
                      RuntimeWarning, stacklevel=2)
    return min(edge_val, f1, f2)


# ---------------------------------------------------------------------------
# Water-filling lower bound
# ---------------------------------------------------------------------------

def waterfill(g, power: float) -> tuple[np.ndarray, float]:
    """Optimal covariance and rate (bits) for log2 det(I + G S G^H), tr S <= P."""
    g = as_cmatrix(g)
    if power <= 0:
        raise ValueError("power must be positive")
    _, s, vh = np.linalg.svd(g, full_matrices=False)
    gains = s ** 2
    gains = gains[gains > 1e-15 * max(1.0, gains[0] if gains.size else 1.0)]
    n = g.shape[1]
    if gains.size == 0:
        return np.zeros((n, n), dtype=np.complex128), 0.0
    inv = 1.0 / gains
    k = gains.size
    while k > 0:
        mu = (power + float(np.sum(inv[:k]))) / k
        if mu > inv[k - 1]:
            break
        k -= 1
    levels = np.maximum(mu - inv[:k], 0.0)
    v = vh.conj().T[:, :k]
    sigma = hermitize(v @ np.diag(levels.astype(np.complex128)) @ v.conj().T)
    rate = float(np.sum(np.log1p(gains[:k] * levels))) / LN2
    return sigma, rate


@dataclass(frozen=True)
class LowerBoundTerms:
    """Non-cooperative lower-bound pieces and their maximizing covariances."""

    c_d: float
    c_3: float
    c_4: float
    sigma_direct: np.ndarray = field(repr=False)
    sigma11_star: np.ndarray = field(repr=False)
    sigma22_star: np.ndarray = field(repr=False)

    @property
    def lower_bound(self) -> float:
        return max(self.c_d, min(self.c_3, self.c_4))


def lower_bound_terms(ch: RelayChannel) -> LowerBoundTerms:
    """Water-filling evaluation of the direct-link and relay-path rates.

    The relay-path receiver term is evaluated at the transmit covariance that
    maximizes the transmitter-to-relay rate, with the direct-link signal
    treated as already-present interference.
    """
    sigma_d, c_d = waterfill(np.sqrt(ch.gamma2) * ch.H2, float(ch.Mt))
    sigma11_star, c_3 = waterfill(np.sqrt(ch.gamma1) * ch.H1, float(ch.Mt))
    k = np.eye(ch.Nt) + ch.gamma2 * ch.H2 @ sigma11_star @ ch.H2.conj().T
    vals, vecs = np.linalg.eigh(hermitize(k))
    k_isqrt = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.conj().T
    g_eff = k_isqrt @ (np.sqrt(ch.gamma3) * ch.H3)
    sigma22_star, c_4 = waterfill(g_eff, float(ch.Mr))
    return LowerBoundTerms(c_d=c_d, c_3=c_3, c_4=c_4,
                           sigma_direct=sigma_d,
                           sigma11_star=sigma11_star,
                           sigma22_star=sigma22_star)


def degenerate_profiles(ch: RelayChannel) -> list[CovarianceProfile]:
    """Strategy instances that reproduce the non-cooperative lower bound.

    All power on v with the direct-link water-filling covariance recovers the
    direct-link rate; all power on u (relay water-filling) with the relay-path
    receiver covariance recovers min of the two relay-path terms.
    """
    lb = lower_bound_terms(ch)
    mt, mr = ch.Mt, ch.Mr
    zero_t = np.zeros((mt, mt), dtype=np.complex128)
    zero_r = np.zeros((mr, mr), dtype=np.complex128)
    zero_c = np.zeros((mt, mr), dtype=np.complex128)
    all_v = CovarianceProfile(sigma_u=zero_t, sigma_v=lb.sigma_direct,
                              sigma_x2=zero_r, cross_ux2=zero_c)
    all_u = CovarianceProfile(sigma_u=lb.sigma11_star, sigma_v=zero_t,
                              sigma_x2=lb.sigma22_star, cross_ux2=zero_c)
    return [all_v, all_u]
