"""Monte Carlo cross-checks for the closed-form rate expressions.

The model is exactly jointly Gaussian, so each mutual information is a
difference of log-det entropies of conditional covariances; estimating those
from sample covariances gives a low-variance oracle that shares no code path
with the closed forms.  A brute-force grid search over scalar power splits
doubles as the oracle for the direct-search optimizers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import RelayChannel
from .linalg import LN2, as_cmatrix, hermitize
from .rates import CovarianceProfile

EXPRESSIONS = ("relay_sc", "mac", "direct_given", "v_unconditional",
               "mac_given_v", "relay_dpc")

_BATCHES = 20
_COV_RIDGE = 1e-9


@dataclass(frozen=True)
class MCEstimate:
    value: float
    std_error: float
    samples: int
    seed: int


def _psd_factor(s: np.ndarray) -> np.ndarray:
    """Eigen-based factor F with F F^H = s (eigenvalues clipped at zero)."""
    s = hermitize(as_cmatrix(s))
    vals, vecs = np.linalg.eigh(s)
    return vecs * np.sqrt(np.clip(vals, 0.0, None))


def _draw_complex(rng, n: int, dim: int) -> np.ndarray:
    return (rng.standard_normal((n, dim))
            + 1j * rng.standard_normal((n, dim))) / np.sqrt(2.0)


def _sample_signals(ch: RelayChannel, p: CovarianceProfile, n: int, rng):
    """Draw n realizations of (u, v, x2, y, y1, y1_nodpc)."""
    mt, mr = ch.Mt, ch.Mr
    f_joint = _psd_factor(p.joint())
    w = _draw_complex(rng, n, mt + mr)
    ux2 = w @ f_joint.T
    u = ux2[:, :mt]
    x2 = ux2[:, mt:]
    v = _draw_complex(rng, n, mt) @ _psd_factor(p.sigma_v).T
    x1 = u + v
    z1 = _draw_complex(rng, n, ch.Nr)
    z = _draw_complex(rng, n, ch.Nt)
    y1 = np.sqrt(ch.gamma1) * x1 @ ch.H1.T + z1
    y = (np.sqrt(ch.gamma2) * x1 @ ch.H2.T
         + np.sqrt(ch.gamma3) * x2 @ ch.H3.T + z)
    # Interference-cancelled relay observation for the precoding expression.
    y1_clean = np.sqrt(ch.gamma1) * u @ ch.H1.T + z1
    return {"u": u, "v": v, "x2": x2, "y": y, "y1": y1, "y1_clean": y1_clean}


def _cond_logdet(target: np.ndarray, given: np.ndarray | None) -> float:
    """ln det of the conditional sample covariance of target given `given`."""
    n = target.shape[0]
    ctt = hermitize(target.conj().T @ target / n)
    if given is not None and given.shape[1] > 0:
        cgg = hermitize(given.conj().T @ given / n)
        cgg = cgg + _COV_RIDGE * np.eye(cgg.shape[0])
        ctg = target.conj().T @ given / n
        ctt = hermitize(ctt - ctg @ np.linalg.solve(cgg, ctg.conj().T))
    sign, val = np.linalg.slogdet(ctt + _COV_RIDGE * np.eye(ctt.shape[0]))
    return float(val)


def _mi_from_samples(sig: dict, which: str) -> float:
    """Plug-in Gaussian MI estimate in bits for one expression tag."""
    if which == "relay_sc":
        a = _cond_logdet(sig["y1"], sig["x2"])
        b = _cond_logdet(sig["y1"], np.hstack([sig["x2"], sig["u"]]))
    elif which == "relay_dpc":
        a = _cond_logdet(sig["y1_clean"], sig["x2"])
        b = _cond_logdet(sig["y1_clean"], np.hstack([sig["x2"], sig["u"]]))
    elif which == "mac":
        a = _cond_logdet(sig["y"], None)
        b = _cond_logdet(sig["y"], np.hstack([sig["u"], sig["x2"]]))
    elif which == "direct_given":
        a = _cond_logdet(sig["y"], np.hstack([sig["u"], sig["x2"]]))
        b = _cond_logdet(sig["y"], np.hstack([sig["u"], sig["x2"], sig["v"]]))
    elif which == "v_unconditional":
        a = _cond_logdet(sig["y"], None)
        b = _cond_logdet(sig["y"], sig["v"])
    elif which == "mac_given_v":
        a = _cond_logdet(sig["y"], sig["v"])
        b = _cond_logdet(sig["y"], np.hstack([sig["u"], sig["x2"], sig["v"]]))
    else:
        raise ValueError(f"unknown expression tag {which!r}")
    return (a - b) / LN2


def estimate_mi_many(ch: RelayChannel, p: CovarianceProfile, whichs,
                     samples: int = 10 ** 6, seed: int = 0) -> dict[str, MCEstimate]:
    """Estimate several expressions from one shared set of draws."""
    if samples < 10 ** 4:
        raise ValueError("need at least 1e4 samples")
    whichs = list(whichs)
    for w in whichs:
        if w not in EXPRESSIONS:
            raise ValueError(f"unknown expression tag {w!r}")
    rng = np.random.default_rng(seed)
    sig = _sample_signals(ch, p, samples, rng)
    out = {}
    bounds = np.linspace(0, samples, _BATCHES + 1).astype(int)
    for w in whichs:
        value = _mi_from_samples(sig, w)
        batch_vals = []
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            part = {k: v[lo:hi] for k, v in sig.items()}
            batch_vals.append(_mi_from_samples(part, w))
        se = float(np.std(batch_vals, ddof=1) / np.sqrt(_BATCHES))
        out[w] = MCEstimate(value=value, std_error=max(se, 1e-15),
                            samples=samples, seed=seed)
    return out


def estimate_mi(ch: RelayChannel, p: CovarianceProfile, which: str,
                samples: int = 10 ** 6, seed: int = 0) -> MCEstimate:
    """Monte Carlo estimate of one mutual-information expression."""
    return estimate_mi_many(ch, p, [which], samples=samples, seed=seed)[which]


# ---------------------------------------------------------------------------
# Scalar brute-force oracle for the optimizers
# ---------------------------------------------------------------------------

def grid_search_scalar(ch: RelayChannel, family: str = "sc",
                       resolution: float = 0.01) -> float:
    """Exhaustive scalar-channel search over (p_u, p_v, p_x2, correlation).

    Channel must be 1x1 everywhere with real gains.  Power splits walk
    [0, Mt] under p_u + p_v <= Mt, the relay power walks [0, Mr], and the
    correlation coefficient walks [-1, 1], all at the given resolution.
    Returns the best rate over both decode orders.
    """
    if not (ch.Mt == ch.Mr == ch.Nt == ch.Nr == 1):
        raise ValueError("grid_search_scalar requires a scalar channel")
    if family not in ("sc", "pre"):
        raise ValueError("family must be 'sc' or 'pre'")
    h1 = float(np.real(ch.H1[0, 0]))
    h2 = float(np.real(ch.H2[0, 0]))
    h3 = float(np.real(ch.H3[0, 0]))
    if abs(complex(ch.H1[0, 0]).imag) + abs(complex(ch.H2[0, 0]).imag) \
            + abs(complex(ch.H3[0, 0]).imag) > 0:
        raise ValueError("grid oracle supports real scalar gains only")
    g1, g2, g3 = ch.gamma1, ch.gamma2, ch.gamma3
    a1 = g1 * h1 * h1
    a2 = g2 * h2 * h2
    a3 = g3 * h3 * h3
    cross_gain = 2.0 * np.sqrt(g2 * g3) * h2 * h3

    pu_grid = np.arange(0.0, 1.0 + resolution / 2, resolution)
    px_grid = np.arange(0.0, 1.0 + resolution / 2, resolution)
    c_grid = np.arange(-1.0, 1.0 + resolution / 2, resolution)
    best = 0.0
    for pu in pu_grid:
        pv = np.arange(0.0, 1.0 - pu + resolution / 2, resolution)
        pv3, px3, c3m = np.meshgrid(pv, px_grid, c_grid,
                                    indexing="ij", sparse=True)
        cond = pu * (1.0 - c3m ** 2)  # conditional u (or x1') power given x2
        if family == "sc":
            relay = np.log2((1.0 + a1 * (cond + pv3))
                            / (1.0 + a1 * pv3))
        else:
            relay = np.log2(1.0 + a1 * cond)
        bab = a2 * pu + cross_gain * c3m * np.sqrt(pu * px3) + a3 * px3
        nv = a2 * pv3
        mac_u = np.log2((1.0 + nv + bab) / (1.0 + nv))
        direct = np.log2(1.0 + nv)
        r_u_first = np.minimum(relay, mac_u) + direct
        mac_v = np.log2(1.0 + bab)
        v_unc = np.log2((1.0 + nv + bab) / (1.0 + bab))
        r_v_first = np.minimum(relay, mac_v) + v_unc
        best = max(best, float(np.max(r_u_first)), float(np.max(r_v_first)))
    return best
