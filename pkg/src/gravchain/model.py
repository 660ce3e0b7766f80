"""Centers, commodities and per-commodity role classification.

Quantities are integral tonnes so that stock totals can be compared exactly.
All records are frozen; operations hand back new records.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Mapping, Union


@dataclass(frozen=True)
class Commodity:
    id: str
    name: str = ""


CommodityLike = Union[Commodity, str]


def commodity_id(commodity: CommodityLike) -> str:
    return commodity.id if isinstance(commodity, Commodity) else commodity


@dataclass(frozen=True)
class HierarchyLabel:
    zone: str
    state: str
    district: str


class Relation(enum.IntEnum):
    """Hierarchical closeness of two centers; the value doubles as priority tier."""

    SAME_STATE = 0
    SAME_ZONE = 1
    OTHER_ZONE = 2


class RoleKind(enum.Enum):
    SUPPLIER = "supplier"
    CONSUMER = "consumer"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class Role:
    kind: RoleKind
    quantity: int = 0

    @classmethod
    def supplier(cls, surplus: int) -> "Role":
        return cls(RoleKind.SUPPLIER, surplus)

    @classmethod
    def consumer(cls, deficit: int) -> "Role":
        return cls(RoleKind.CONSUMER, deficit)

    @classmethod
    def neutral(cls) -> "Role":
        return cls(RoleKind.NEUTRAL, 0)

    @property
    def is_supplier(self) -> bool:
        return self.kind is RoleKind.SUPPLIER

    @property
    def is_consumer(self) -> bool:
        return self.kind is RoleKind.CONSUMER


@dataclass(frozen=True)
class Center:
    """A distribution center.

    ``geo_position`` is used for transport cost; ``virtual_position`` lives in
    the clustering space and carries no physical meaning.
    """

    id: str
    hierarchy: HierarchyLabel
    geo_position: tuple[float, float]
    virtual_position: tuple[float, float]
    stock: Mapping[str, int] = field(default_factory=dict)
    reserve: Mapping[str, int] = field(default_factory=dict)
    capacity: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for c, cap in self.capacity.items():
            s = self.stock.get(c, 0)
            r = self.reserve.get(c, 0)
            if not 0 <= s <= cap:
                raise ValueError(f"center {self.id}: stock {s} outside [0, {cap}] for {c}")
            if not 0 <= r <= cap:
                raise ValueError(f"center {self.id}: reserve exceeds capacity for {c}")
        for c in set(self.stock) | set(self.reserve):
            if c not in self.capacity:
                raise ValueError(f"center {self.id}: no capacity given for {c}")

    @property
    def commodities(self) -> tuple[str, ...]:
        return tuple(sorted(self.capacity))

    def stock_of(self, commodity: CommodityLike) -> int:
        return self.stock.get(commodity_id(commodity), 0)

    def reserve_of(self, commodity: CommodityLike) -> int:
        return self.reserve.get(commodity_id(commodity), 0)

    def capacity_of(self, commodity: CommodityLike) -> int:
        return self.capacity.get(commodity_id(commodity), 0)

    def with_stock(self, commodity: CommodityLike, value: int) -> "Center":
        cid = commodity_id(commodity)
        return replace(self, stock={**self.stock, cid: value})


def classify_role(center: Center, commodity: CommodityLike) -> Role:
    stock = center.stock_of(commodity)
    reserve = center.reserve_of(commodity)
    if stock > reserve:
        return Role.supplier(stock - reserve)
    if stock < reserve:
        return Role.consumer(reserve - stock)
    return Role.neutral()


def signed_mass(center: Center, commodity: CommodityLike) -> int:
    """Surplus as a positive mass, deficit as a negative one."""
    return center.stock_of(commodity) - center.reserve_of(commodity)


def surplus(center: Center, commodity: CommodityLike) -> int:
    return max(0, signed_mass(center, commodity))


def deficit(center: Center, commodity: CommodityLike) -> int:
    return max(0, -signed_mass(center, commodity))


def apply_inventory_delta(
    center: Center, commodity: CommodityLike, delta: int
) -> tuple[Center, int]:
    """Add ``delta`` tonnes, clamped to ``[0, capacity]``.

    Returns the new center and the quantity actually absorbed; the caller
    owns whatever was clipped (``delta - absorbed``).
    """
    stock = center.stock_of(commodity)
    new = min(max(stock + delta, 0), center.capacity_of(commodity))
    if new == stock:
        return center, 0
    return center.with_stock(commodity, new), new - stock


def hierarchy_relation(a: Center, b: Center) -> Relation:
    if a.hierarchy.state == b.hierarchy.state:
        return Relation.SAME_STATE
    if a.hierarchy.zone == b.hierarchy.zone:
        return Relation.SAME_ZONE
    return Relation.OTHER_ZONE
