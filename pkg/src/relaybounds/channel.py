"""Fixed Gaussian MIMO relay channel and the angle-sweep experiment family.

The channel is y1 = sqrt(g1) H1 x1 + z1 at the relay and
y = sqrt(g2) H2 x1 + sqrt(g3) H3 x2 + z at the receiver, with unit-variance
circularly symmetric noise and per-antenna SNR scalings g1, g2, g3.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_cmatrix

TOPOLOGY_KINDS = ("equidistant", "relay-near-tx", "relay-near-rx")


@dataclass(frozen=True)
class RelayChannel:
    """Channel matrices plus SNR scalings; immutable value type."""

    H1: np.ndarray  # Nr x Mt, transmitter -> relay
    H2: np.ndarray  # Nt x Mt, transmitter -> receiver
    H3: np.ndarray  # Nt x Mr, relay -> receiver
    gamma1: float
    gamma2: float
    gamma3: float

    def __post_init__(self):
        h1 = as_cmatrix(self.H1)
        h2 = as_cmatrix(self.H2)
        h3 = as_cmatrix(self.H3)
        if h2.shape[1] != h1.shape[1]:
            raise ValueError("H1 and H2 must share the transmit dimension")
        if h3.shape[0] != h2.shape[0]:
            raise ValueError("H2 and H3 must share the receiver dimension")
        for name in ("gamma1", "gamma2", "gamma3"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        for name, m in (("H1", h1), ("H2", h2), ("H3", h3)):
            m.setflags(write=False)
            object.__setattr__(self, name, m)

    @property
    def Mt(self) -> int:
        return self.H1.shape[1]

    @property
    def Mr(self) -> int:
        return self.H3.shape[1]

    @property
    def Nt(self) -> int:
        return self.H2.shape[0]

    @property
    def Nr(self) -> int:
        return self.H1.shape[0]


@dataclass(frozen=True)
class Topology:
    """Relay placement archetype; fixes (g1, g2, g3) from one base SNR scaling.

    equidistant   -> (g, g, g)
    relay-near-tx -> (10g, g, g)
    relay-near-rx -> (g, g, 10g)
    """

    kind: str = "equidistant"
    base_gamma: float = 0.5

    def __post_init__(self):
        if self.kind not in TOPOLOGY_KINDS:
            raise ValueError(f"unknown topology kind {self.kind!r}")
        if self.base_gamma <= 0:
            raise ValueError("base_gamma must be positive")

    def gammas(self) -> tuple[float, float, float]:
        g = self.base_gamma
        if self.kind == "relay-near-tx":
            return (10 * g, g, g)
        if self.kind == "relay-near-rx":
            return (g, g, 10 * g)
        return (g, g, g)


def make_angle_channel(theta: float, h1_norm: float = 10.0,
                       topology: Topology | None = None) -> RelayChannel:
    """Two-antenna-transmitter experiment channel at relay angle ``theta``.

    H2 = [1 0], H3 = [1], H1 = h1_norm * [cos theta, sin theta];
    theta is the angle between H1 and the direct link H2, in radians.
    """
    if not 0.0 <= theta <= np.pi:
        raise ValueError("theta must lie in [0, pi]")
    if h1_norm <= 0:
        raise ValueError("h1_norm must be positive")
    topology = topology or Topology()
    g1, g2, g3 = topology.gammas()
    h1 = h1_norm * np.array([[np.cos(theta), np.sin(theta)]])
    return RelayChannel(H1=h1, H2=np.array([[1.0, 0.0]]),
                        H3=np.array([[1.0]]),
                        gamma1=g1, gamma2=g2, gamma3=g3)


def angle_between(h1, h2) -> float:
    """Angle in [0, pi] between two channel rows (real inner product)."""
    a = np.asarray(h1, dtype=np.complex128).ravel()
    b = np.asarray(h2, dtype=np.complex128).ravel()
    if a.shape != b.shape:
        raise ValueError("rows must have equal length")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("angle undefined for a zero vector")
    c = float(np.real(np.vdot(b, a))) / (na * nb)
    return float(np.arccos(np.clip(c, -1.0, 1.0)))
