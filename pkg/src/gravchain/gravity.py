"""Force law, unit cost, urgency growth and clustering-space kinematics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .errors import ConfigError, DomainError
from .model import Center, CommodityLike, commodity_id, signed_mass

Position = tuple[float, float]


@dataclass(frozen=True)
class UrgencyState:
    g0: float
    current: float
    waiting_time: int = 0

    @classmethod
    def fresh(cls, g0: float) -> "UrgencyState":
        return cls(g0=g0, current=g0, waiting_time=0)


@dataclass(frozen=True)
class CostParams:
    transport_rate: float = 0.0
    base_price: Mapping[str, float] = field(default_factory=dict)
    handling_fee: float = 0.0

    def __post_init__(self):
        if self.transport_rate < 0 or self.handling_fee < 0:
            raise ConfigError("cost parameters must be non-negative")
        for c, p in self.base_price.items():
            if p < 0:
                raise ConfigError(f"negative base price for {c}")


@dataclass(frozen=True)
class ForceEvaluation:
    consumer_id: str
    supplier_id: str
    commodity: str
    force: float
    unit_cost: float


def pair_force(mc: float, ms: float, g: float, r: float) -> float:
    """Attraction on a consumer mass ``mc`` from a supplier mass ``ms``.

    Masses are signed (surplus positive, deficit negative), so the result is
    positive exactly when the two have opposite signs.
    """
    if not r > 0:
        raise DomainError(f"unit cost must be positive, got {r!r}")
    if g < 0:
        raise DomainError(f"urgency must be non-negative, got {g!r}")
    return -g * mc * ms / r


def force_matrix(
    consumer_mass: np.ndarray, supplier_mass: np.ndarray, g: np.ndarray, cost: np.ndarray
) -> np.ndarray:
    """Vectorised ``pair_force`` over a consumers x suppliers grid.

    ``g`` is per consumer; ``cost`` has shape ``(n_consumers, n_suppliers)``.
    """
    mc = np.asarray(consumer_mass, dtype=float)[:, None]
    ms = np.asarray(supplier_mass, dtype=float)[None, :]
    gg = np.asarray(g, dtype=float)[:, None]
    cost = np.asarray(cost, dtype=float)
    if np.any(cost <= 0):
        raise DomainError("unit cost must be positive")
    return -gg * mc * ms / cost


def geo_distance(a: Center, b: Center) -> float:
    return math.dist(a.geo_position, b.geo_position)


def unit_cost(
    supplier: Center, consumer: Center, commodity: CommodityLike, params: CostParams
) -> float:
    cid = commodity_id(commodity)
    try:
        price = params.base_price[cid]
    except KeyError:
        raise ConfigError(f"no base price configured for commodity {cid!r}") from None
    return price + params.handling_fee + params.transport_rate * geo_distance(supplier, consumer)


def evaluate_pair(
    consumer: Center,
    supplier: Center,
    commodity: CommodityLike,
    urgency: float,
    params: CostParams,
) -> ForceEvaluation:
    cid = commodity_id(commodity)
    r = unit_cost(supplier, consumer, cid, params)
    f = pair_force(signed_mass(consumer, cid), signed_mass(supplier, cid), urgency, r)
    return ForceEvaluation(consumer.id, supplier.id, cid, f, r)


def urgency_update(
    u: UrgencyState, dt: int, *, alpha: float, g_max: float = 1.0
) -> UrgencyState:
    """Advance urgency by ``dt`` ticks: ``min(g_max, g0 + alpha * waited)``.

    Computed from ``g0`` and the total wait, never incrementally, so splitting
    ``dt`` into pieces gives bit-identical results.
    """
    if dt < 0:
        raise DomainError("dt must be non-negative")
    waited = u.waiting_time + dt
    return replace(u, current=min(g_max, u.g0 + alpha * waited), waiting_time=waited)


def virtual_radius(mass_magnitude: float, r0: float, m_ref: float) -> float:
    if mass_magnitude < 0:
        raise DomainError("mass magnitude must be non-negative")
    return r0 * math.sqrt(mass_magnitude / m_ref)


def virtual_step(
    consumer_pos: Position, target_pos: Position, min_separation: float, beta: float
) -> Position:
    """Move a fraction ``beta`` of the way to the target, stopping at ``min_separation``."""
    if not 0 < beta <= 1:
        raise DomainError("beta must lie in (0, 1]")
    if min_separation < 0:
        raise DomainError("min_separation must be non-negative")
    d = math.dist(consumer_pos, target_pos)
    if d <= min_separation:
        return consumer_pos
    new_d = max(min_separation, (1.0 - beta) * d)
    if new_d == 0.0:
        return (float(target_pos[0]), float(target_pos[1]))
    k = new_d / d
    return (
        target_pos[0] + (consumer_pos[0] - target_pos[0]) * k,
        target_pos[1] + (consumer_pos[1] - target_pos[1]) * k,
    )
