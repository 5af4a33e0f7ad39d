"""Step curves of a uniform-price day-ahead auction.

Curves are cumulative-volume-versus-price step functions. Prices live on a
discrete tick grid and are stored as integer tick counts; volumes are stored
as integer multiples of 0.1 MWh. Both choices make curve arithmetic exact:
intersection tie-breaking is reproducible and cumulative sums do not depend
on summation order.

Evaluation is right-continuous throughout: the curve value at price z is the
cumulative volume of the last breakpoint at or below z. Below its first
breakpoint a supply curve is 0 and a demand curve is its full volume. The
convention is isolated in ``StepCurve.eval_tick`` so it could be flipped in
one place.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

from .errors import CurveError, DataError, NoEquilibriumError

#: Volume resolution: volumes are integer multiples of 0.1 MWh.
VOLUME_SCALE = 10

SUPPLY = "supply"
DEMAND = "demand"


def to_deci(volume_mwh: float) -> int:
    """Quantize a volume in MWh to integer 0.1-MWh units."""
    return int(round(volume_mwh * VOLUME_SCALE))


def from_deci(volume_deci: int) -> float:
    return volume_deci / VOLUME_SCALE


@dataclass(frozen=True)
class MarketBounds:
    """Admissible price range and tick size of the exchange."""

    p_min: float = -500.0
    p_max: float = 3000.0
    tick: float = 0.1

    def __post_init__(self):
        if not self.p_min < self.p_max:
            raise CurveError(f"p_min {self.p_min} must be below p_max {self.p_max}")
        if not self.tick > 0:
            raise CurveError(f"tick must be positive, got {self.tick}")

    @property
    def n_ticks(self) -> int:
        """Index of the last tick; the grid is 0..n_ticks inclusive."""
        return int(round((self.p_max - self.p_min) / self.tick))

    def to_tick(self, price: float) -> int:
        t = int(round((price - self.p_min) / self.tick))
        if t < 0 or t > self.n_ticks:
            raise CurveError(
                f"price {price} outside [{self.p_min}, {self.p_max}]"
            )
        return t

    def to_price(self, tick: int) -> float:
        return round(self.p_min + tick * self.tick, 10)


DEFAULT_BOUNDS = MarketBounds()


@dataclass(frozen=True)
class StepCurve:
    """Monotone cumulative-volume step function of price.

    ``ticks`` are strictly increasing tick indices; ``cum`` holds the
    cumulative volume (0.1-MWh units) at each breakpoint. Supply curves are
    non-decreasing in price, demand curves non-increasing.
    """

    side: str
    ticks: np.ndarray
    cum: np.ndarray
    bounds: MarketBounds = DEFAULT_BOUNDS

    def __post_init__(self):
        ticks = np.asarray(self.ticks, dtype=np.int64)
        cum = np.asarray(self.cum, dtype=np.int64)
        object.__setattr__(self, "ticks", ticks)
        object.__setattr__(self, "cum", cum)
        if self.side not in (SUPPLY, DEMAND):
            raise CurveError(f"unknown curve side {self.side!r}")
        if ticks.size == 0:
            raise CurveError("a step curve needs at least one breakpoint")
        if ticks.size != cum.size:
            raise CurveError("breakpoint arrays have mismatched lengths")
        if np.any(np.diff(ticks) <= 0):
            raise CurveError("breakpoint prices must be strictly increasing")
        if ticks[0] < 0 or ticks[-1] > self.bounds.n_ticks:
            raise CurveError("breakpoints outside market bounds")
        if np.any(cum < 0):
            raise CurveError("cumulative volumes must be non-negative")
        diffs = np.diff(cum)
        if self.side == SUPPLY and np.any(diffs < 0):
            raise CurveError("supply cumulative volume must be non-decreasing")
        if self.side == DEMAND and np.any(diffs > 0):
            raise CurveError("demand cumulative volume must be non-increasing")
        ticks.flags.writeable = False
        cum.flags.writeable = False

    # -- evaluation ------------------------------------------------------

    def eval_tick(self, tick) -> Union[int, np.ndarray]:
        """Right-continuous evaluation at integer tick(s), in 0.1-MWh units."""
        idx = np.searchsorted(self.ticks, tick, side="right") - 1
        below = from_first = self.cum[0] if self.side == DEMAND else 0
        if np.isscalar(tick) or np.ndim(tick) == 0:
            return int(self.cum[idx]) if idx >= 0 else int(below)
        out = np.where(idx >= 0, self.cum[np.maximum(idx, 0)], from_first)
        return out.astype(np.int64)

    def eval(self, price: float) -> float:
        """Cumulative volume (MWh) at a price; errors if out of bounds."""
        return from_deci(self.eval_tick(self.bounds.to_tick(price)))

    # -- views -----------------------------------------------------------

    @property
    def prices(self) -> np.ndarray:
        return self.bounds.p_min + self.ticks * self.bounds.tick

    @property
    def volumes(self) -> np.ndarray:
        """Cumulative volumes in MWh."""
        return self.cum / VOLUME_SCALE

    @property
    def total(self) -> float:
        """Volume at the price cap, in MWh."""
        return from_deci(self.eval_tick(self.bounds.n_ticks))

    def increments(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-breakpoint volume increments (0.1-MWh units).

        For demand curves the increment at a breakpoint is how much volume
        the curve loses moving up through it, so increments are reported
        against the descending accumulation.
        """
        if self.side == SUPPLY:
            deltas = np.diff(self.cum, prepend=0)
        else:
            deltas = -np.diff(self.cum, append=0)
        return self.ticks, deltas


class Equilibrium(NamedTuple):
    price: float
    volume: float
    tick: int


def build_step_curve(
    bids: Iterable[tuple[float, float]],
    side: str,
    bounds: MarketBounds = DEFAULT_BOUNDS,
) -> StepCurve:
    """Aggregate a raw bid ladder into a cumulative step curve.

    Duplicate prices are merged by summing volume. Supply accumulates in
    ascending price order; demand accumulates descending, so the value at a
    breakpoint is the volume bid at or above that price.
    """
    by_tick: dict[int, int] = {}
    for price, volume in bids:
        if volume < 0:
            raise CurveError(f"negative bid volume {volume} at price {price}")
        try:
            t = bounds.to_tick(price)
        except CurveError:
            raise CurveError(
                f"bid price {price} outside [{bounds.p_min}, {bounds.p_max}]"
            ) from None
        by_tick[t] = by_tick.get(t, 0) + to_deci(volume)
    if not by_tick:
        raise CurveError("cannot build a curve from an empty bid list")
    ticks = np.array(sorted(by_tick), dtype=np.int64)
    deltas = np.array([by_tick[t] for t in ticks], dtype=np.int64)
    if side == SUPPLY:
        cum = np.cumsum(deltas)
    else:
        cum = np.cumsum(deltas[::-1])[::-1]
    return StepCurve(side=side, ticks=ticks, cum=cum, bounds=bounds)


@dataclass(frozen=True)
class AuctionSnapshot:
    """Raw supply/demand pair for one delivery hour."""

    day: date
    hour: int
    supply: StepCurve
    demand: StepCurve

    def __post_init__(self):
        if not 0 <= self.hour <= 23:
            raise DataError(f"hour {self.hour} outside 0..23")
        if self.supply.side != SUPPLY or self.demand.side != DEMAND:
            raise CurveError("snapshot curves have swapped sides")
        if self.supply.bounds != self.demand.bounds:
            raise CurveError("snapshot curves use different market bounds")
        # Intersection must exist somewhere on the grid: at the price cap the
        # supply total has to reach what demand still asks there.
        if self.supply.cum[-1] < self.demand.cum[-1]:
            raise NoEquilibriumError(
                f"{self.day} h{self.hour:02d}: supply never reaches demand"
            )

    @property
    def bounds(self) -> MarketBounds:
        return self.supply.bounds


@dataclass(frozen=True)
class TransformedSnapshot:
    """Snapshot after folding demand elasticity into the supply curve."""

    day: date
    hour: int
    supply: StepCurve
    inelastic_demand_volume: float

    def __post_init__(self):
        if self.supply.side != SUPPLY:
            raise CurveError("transformed curve must be supply-side")
        if self.inelastic_demand_volume < 0:
            raise CurveError("inelastic demand volume must be non-negative")

    @property
    def bounds(self) -> MarketBounds:
        return self.supply.bounds


def transform(snapshot: AuctionSnapshot) -> TransformedSnapshot:
    """Rewrite the market with a perfectly inelastic demand side.

    The transformed supply at price z is
    ``supply(z) + demand(p_min) - demand(z)``: buyers who drop out as the
    price rises reappear as extra supply. Demand becomes the single volume
    ``demand(p_min)`` (everything demanded at the price floor), which keeps
    the equilibrium price identical on every tick and never shrinks the
    equilibrium volume.
    """
    sup, dem = snapshot.supply, snapshot.demand
    bounds = snapshot.bounds
    union = np.union1d(sup.ticks, dem.ticks)
    d_total = int(dem.cum[0])
    cum = sup.eval_tick(union) + d_total - dem.eval_tick(union)
    steps = np.diff(cum, prepend=0)
    if np.any(steps < 0):
        bad = union[int(np.argmax(steps < 0))]
        raise CurveError(
            f"{snapshot.day} h{snapshot.hour:02d}: transformed supply "
            f"decreases at price {bounds.to_price(int(bad))} (corrupt curves)"
        )
    keep = steps > 0
    if not np.any(keep):
        ticks, cum = union[-1:], cum[-1:]
    else:
        ticks, cum = union[keep], cum[keep]
    curve = StepCurve(side=SUPPLY, ticks=ticks, cum=cum, bounds=bounds)
    return TransformedSnapshot(
        day=snapshot.day,
        hour=snapshot.hour,
        supply=curve,
        inelastic_demand_volume=from_deci(d_total),
    )


def intersect(
    supply: StepCurve,
    demand: Union[StepCurve, float],
) -> Equilibrium:
    """Find the market equilibrium of a supply curve against demand.

    ``demand`` is either a demand-side curve or a constant volume in MWh.
    Returns the lowest tick price at which cumulative supply meets what is
    still demanded there (minimal market-clearing price convention); the
    traded volume is the smaller of the two curve values at that price.
    """
    bounds = supply.bounds
    if isinstance(demand, StepCurve):
        if demand.bounds != bounds:
            raise CurveError("curves use different market bounds")
        dem_at = demand.eval_tick
    else:
        if demand < 0:
            raise DataError(f"scalar demand must be non-negative, got {demand}")
        level = to_deci(demand)

        def dem_at(t):
            return level

    def gap(t: int) -> int:
        return int(supply.eval_tick(t)) - int(dem_at(t))

    hi = bounds.n_ticks
    if gap(hi) < 0:
        raise NoEquilibriumError("no equilibrium: supply never reaches demand")
    lo = 0
    if gap(lo) >= 0:
        hi = lo
    while lo < hi:
        mid = (lo + hi) // 2
        if gap(mid) >= 0:
            hi = mid
        else:
            lo = mid + 1
    s = int(supply.eval_tick(hi))
    d = int(dem_at(hi))
    return Equilibrium(
        price=bounds.to_price(hi), volume=from_deci(min(s, d)), tick=hi
    )


def average_curves(curves: Sequence[StepCurve]) -> StepCurve:
    """Pointwise average of same-side curves on their union price grid.

    Used to synthesize the missing spring clock-change hour and to merge the
    doubled autumn hour. Averaged volumes are rounded back to the 0.1-MWh
    grid (half-up on ties).
    """
    if not curves:
        raise DataError("cannot average zero curves")
    side = curves[0].side
    bounds = curves[0].bounds
    if any(c.side != side or c.bounds != bounds for c in curves):
        raise CurveError("curves to average must share side and bounds")
    union = curves[0].ticks
    for c in curves[1:]:
        union = np.union1d(union, c.ticks)
    total = np.zeros(union.size, dtype=np.int64)
    for c in curves:
        total += c.eval_tick(union)
    cum = (total * 2 + len(curves)) // (2 * len(curves))
    return StepCurve(side=side, ticks=union, cum=cum, bounds=bounds)
