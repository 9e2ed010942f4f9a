"""First-order radio energy model and the analytic cluster-count estimate.

Transmit cost switches from a d^2 (free space) to a d^4 (two-ray) amplifier
term at the crossover distance ``d0 = sqrt(eps1 / eps2)``, where the two
regimes agree. All quantities are SI: joules, bits, metres.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field


class EnergyModelError(ValueError):
    pass


@dataclass(frozen=True)
class RadioParams:
    e_tx: float = 50e-9  # J/bit, transmitter electronics
    e_rx: float = 50e-9  # J/bit, receiver electronics
    e_da: float = 5e-9  # J/bit per aggregated message
    eps1: float = 10e-12  # J/(bit m^2), free space
    eps2: float = 0.0013e-12  # J/(bit m^4), two-ray
    d0: float = field(init=False)

    def __post_init__(self):
        for name in ("e_tx", "e_rx", "e_da", "eps1", "eps2"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise EnergyModelError(f"{name} must be a positive finite number, got {v!r}")
        object.__setattr__(self, "d0", crossover_distance(self))


@dataclass(frozen=True)
class FieldParams:
    n_nodes: int = 100
    side: float = 100.0
    d1: float = 90.0  # cluster head to base station, metres

    def __post_init__(self):
        if self.n_nodes < 1:
            raise EnergyModelError(f"n_nodes must be >= 1, got {self.n_nodes}")
        if not self.side > 0:
            raise EnergyModelError(f"side must be > 0, got {self.side}")
        if not self.d1 > 0:
            raise EnergyModelError(f"d1 must be > 0, got {self.d1}")


def _nonneg(**kw):
    for k, v in kw.items():
        if v < 0:
            raise EnergyModelError(f"{k} must be >= 0, got {v!r}")


def crossover_distance(p) -> float:
    if not (p.eps1 > 0 and p.eps2 > 0):
        raise EnergyModelError("eps1 and eps2 must be positive")
    return math.sqrt(p.eps1 / p.eps2)


DEFAULT_RADIO = RadioParams()


def tx_energy(bits, d, p: RadioParams = DEFAULT_RADIO) -> float:
    _nonneg(bits=bits, d=d)
    if d < p.d0:
        return bits * (p.e_tx + p.eps1 * d * d)
    return bits * (p.e_tx + p.eps2 * d * d * d * d)


def rx_energy(bits, p: RadioParams = DEFAULT_RADIO) -> float:
    _nonneg(bits=bits)
    return bits * p.e_rx


def aggregation_energy(bits, messages, p: RadioParams = DEFAULT_RADIO) -> float:
    _nonneg(bits=bits, messages=messages)
    return bits * messages * p.e_da


@dataclass(frozen=True)
class ClusterEnergy:
    head: float  # E1, one cluster head per frame
    member: float  # E2, one member per frame
    cluster: float  # Ec
    total: float  # M * Ec


def analytic_cluster_energy(bits, m, fld: FieldParams = FieldParams(), p: RadioParams = DEFAULT_RADIO) -> ClusterEnergy:
    """Per-frame energy with ``m`` clusters over an A x A field.

    ``m`` may be real-valued so the total can be differentiated. The head
    term keeps ``bits * e_tx * N/M`` for receiving member frames, as in the
    closed form the optimum is derived from.
    """
    n = fld.n_nodes
    if not 1 <= m <= n:
        raise EnergyModelError(f"cluster count must lie in [1, {n}], got {m}")
    per = n / m
    d1 = fld.d1
    head = bits * p.e_tx * per + bits * p.e_da * per + bits * p.eps2 * d1 * d1 * d1 * d1
    d2_sq = fld.side * fld.side / (2.0 * math.pi * m)
    member = bits * p.e_tx + bits * p.eps1 * d2_sq
    cluster = head + (per - 1.0) * member
    return ClusterEnergy(head, member, cluster, m * cluster)


def optimal_cluster_count(fld: FieldParams = FieldParams(), p: RadioParams = DEFAULT_RADIO) -> tuple[float, int]:
    """Stationary point of the total frame energy in M, plus its nearest
    integer (at least 1)."""
    denom = p.eps2 * fld.d1 ** 4 - p.e_tx
    if denom <= 0:
        raise EnergyModelError("base station too close for this model (eps2 * d1^4 <= e_tx)")
    m = fld.side * math.sqrt(fld.n_nodes / (2.0 * math.pi) * p.eps1 / denom)
    return m, max(1, int(math.floor(m + 0.5)))
