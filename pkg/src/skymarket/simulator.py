"""Time-slotted world model: scenario generation, dynamics, experiments.

A ``World`` holds every agent's state in struct-of-arrays form and
advances one slot at a time: batteries follow the linear activity model,
matched vehicles drive to their rendezvous, charging sessions hold a pad
until the satisfactory level and UAVs that cross the urgency threshold
queue as bidders. Every ``window_len`` seconds the accumulated bidders
and idle vehicles clear through the configured scheme (the auction, the
omniscient exhaustive matcher, or the static-pad variant).

Scenario generation draws each agent from its own seeded substream keyed
by (seed, side, index), so enlarging one side of the market leaves every
other draw untouched: sweeps over fleet sizes are paired comparisons by
construction, and identical (config, seed) pairs rebuild bit-identical
worlds.

Scheme-specific geometry: a mobile vehicle meets its UAV halfway, so its
quality score reflects half its distance to the sensing spot; a static
pad is met at the pad, full distance, and never moves.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import _kernels as K
from .audit import audit_market, non_envy_ratio
from .baselines import MarketTooLargeError, optimal_scheme_outcome
from .energy import ascend_power, descend_power, flight_power, hover_power
from .mechanism import BidderInfo, admit, run_auction
from .types import (
    Activity,
    AuctionOutcome,
    Bid,
    PowerParams,
    ScenarioConfig,
    UavState,
    UgvState,
    validate,
)
from .valuation import qors_from_distance

SCHEME_OURS = "ours"
SCHEME_OPTIMAL = "optimal"
SCHEME_STATIC = "static"
ALL_SCHEMES = (SCHEME_OURS, SCHEME_OPTIMAL, SCHEME_STATIC)

_CODE_TO_ACTIVITY = {
    K.ACT_SENSE: Activity.HOVERING,
    K.ACT_WAIT: Activity.HOVERING,
    K.ACT_FLY_OUT: Activity.FLYING,
    K.ACT_FLY_BACK: Activity.FLYING,
    K.ACT_DESCEND: Activity.DESCENDING,
    K.ACT_CHARGE: Activity.CHARGING,
    K.ACT_ASCEND: Activity.ASCENDING,
}

__all__ = [
    "SCHEME_OURS",
    "SCHEME_OPTIMAL",
    "SCHEME_STATIC",
    "ALL_SCHEMES",
    "MetricsRow",
    "World",
    "rendezvous",
    "satisfaction_level",
    "generate_scenario",
    "advance_slot",
    "close_window",
    "run_world",
    "ExperimentResult",
    "run_experiment",
    "METRICS_CSV_HEADER",
    "AGGREGATE_CSV_HEADER",
    "metrics_row_tuple",
    "aggregate_rows",
]


@dataclass(frozen=True)
class MetricsRow:
    """Per-window bookkeeping; surplus must equal the utility total."""

    scheme: str
    ugv_count: int
    tau: float
    seed: int
    window: int
    sl: float
    uav_utility: float
    ugv_utility: float
    surplus: float
    non_envy_ratio: float
    winners: int

    def __post_init__(self):
        if abs(self.surplus - (self.uav_utility + self.ugv_utility)) > 1e-9:
            raise ValueError(
                "surplus must equal total UAV + UGV utility "
                f"({self.surplus} vs {self.uav_utility + self.ugv_utility})"
            )


@dataclass
class World:
    """Mutable simulation state; one instance per run, single-threaded."""

    config: ScenarioConfig
    scheme: str
    seed: int
    clock: int = 0
    window_count: int = 0

    # struct-of-arrays agent state (see _kernels for column layouts)
    uav_f: np.ndarray = field(default=None, repr=False)
    uav_i: np.ndarray = field(default=None, repr=False)
    ugv_f: np.ndarray = field(default=None, repr=False)
    ugv_i: np.ndarray = field(default=None, repr=False)

    # per-UAV bookkeeping outside the kernel
    soc_alert: np.ndarray = field(default=None, repr=False)
    eta_i: np.ndarray = field(default=None, repr=False)
    bidder: np.ndarray = field(default=None, repr=False)
    excluded: np.ndarray = field(default=None, repr=False)
    fail_count: np.ndarray = field(default=None, repr=False)
    enqueue_slot: np.ndarray = field(default=None, repr=False)
    phi_sum: np.ndarray = field(default=None, repr=False)
    rho_sum: np.ndarray = field(default=None, repr=False)
    sample_count: np.ndarray = field(default=None, repr=False)

    # per-UGV static attributes
    ugv_speed_kmh: np.ndarray = field(default=None, repr=False)
    ugv_transfer_power: np.ndarray = field(default=None, repr=False)
    ugv_eta: np.ndarray = field(default=None, repr=False)

    @property
    def spot(self) -> tuple[float, float]:
        return self.config.spot

    @property
    def num_uavs(self) -> int:
        return self.uav_f.shape[0]

    @property
    def num_ugvs(self) -> int:
        return self.ugv_f.shape[0]

    def uav_state(self, i: int) -> UavState:
        """Validated value-object snapshot of UAV i."""
        c = self.config
        return UavState(
            id=i,
            position=(
                float(self.uav_f[i, K.F_X]),
                float(self.uav_f[i, K.F_Y]),
                float(self.uav_f[i, K.F_Z]),
            ),
            velocity_max=c.uav_speed_max,
            battery_capacity=float(self.uav_f[i, K.F_CAP]),
            soc=float(self.uav_f[i, K.F_SOC]),
            soc_alert=float(self.soc_alert[i]),
            soc_satisfactory=float(self.uav_f[i, K.F_SAT]),
            activity=_CODE_TO_ACTIVITY[int(self.uav_i[i, K.I_ACT])],
            mass=c.uav_mass_kg,
            power_params=PowerParams(c.kappa1, c.kappa2, c.kappa3, c.eps1, c.eps2),
            discharge_efficiency=float(self.eta_i[i]),
            sensing_radius=c.uav_sensing_radius,
            detection_angle=c.uav_detection_angle,
            altitude_max=c.uav_altitude_max,
        )

    def ugv_state(self, j: int, qors: float) -> UgvState:
        c = self.config
        return UgvState(
            id=j,
            position=(float(self.ugv_f[j, K.G_X]), float(self.ugv_f[j, K.G_Y])),
            speed_kmh=float(self.ugv_speed_kmh[j]),
            supply_capacity=c.ugv_supply_wh,
            supply_remaining=float(self.ugv_f[j, K.G_SUPPLY]),
            transfer_power=float(self.ugv_transfer_power[j]),
            transfer_efficiency=float(self.ugv_eta[j]),
            qors=qors,
        )

    def service_distance(self, j: int) -> float:
        """Distance a UAV flies to reach vehicle j's service point."""
        d = math.hypot(
            self.ugv_f[j, K.G_X] - self.spot[0], self.ugv_f[j, K.G_Y] - self.spot[1]
        )
        return d if self.scheme == SCHEME_STATIC else d / 2.0

    def ugv_qors(self, j: int) -> float:
        c = self.config
        d = min(self.service_distance(j), c.qors_ref_distance)
        return qors_from_distance(d, c.qors_ref_distance, c.qors_floor)

    def urgency(self) -> np.ndarray:
        """Charging urgency per UAV, pinned to 1 below the alert level."""
        rho = 1.0 - (self.uav_f[:, K.F_SOC] - self.soc_alert) / self.uav_f[:, K.F_CAP]
        return np.minimum(rho, 1.0)


def rendezvous(spot: Sequence[float], ugv_pos: Sequence[float]) -> tuple[float, float]:
    """Meeting point for a matched pair: the spot-to-vehicle midpoint."""
    return ((spot[0] + ugv_pos[0]) / 2.0, (spot[1] + ugv_pos[1]) / 2.0)


def satisfaction_level(
    outcome: AuctionOutcome,
    rho_bars: Mapping[int, float],
    qs: Optional[Mapping[int, float]] = None,
) -> float:
    """Allocation quality weighted by urgency: sum of q_j * rho_bar_i."""
    total = 0.0
    for m in outcome.winners:
        q = qs[m.ugv_id] if qs is not None else m.q
        total += q * rho_bars[m.uav_id]
    return total


def generate_scenario(config: ScenarioConfig, seed: Optional[int] = None,
                      scheme: str = SCHEME_OURS) -> World:
    """Build a deterministic initial world for (config, seed).

    UAVs hover over the sensing spot inside the task circle at their
    drawn working altitude; vehicles sit at drawn bearings and distances
    from the spot. Each agent consumes its own RNG substream, so worlds
    with more agents extend, rather than reshuffle, smaller ones.
    """
    problems = validate(config)
    if problems:
        raise ValueError("invalid scenario config: " + "; ".join(problems))
    if scheme not in ALL_SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if seed is None:
        seed = config.seed
    if seed < 0:
        raise ValueError("seed must be >= 0")

    c = config
    n, m = c.uav_count, c.ugv_count
    uav_f = np.zeros((n, K.N_UAV_F))
    uav_i = np.zeros((n, K.N_UAV_I), dtype=np.int64)
    ugv_f = np.zeros((m, K.N_UGV_F))
    ugv_i = np.zeros((m, K.N_UGV_I), dtype=np.int64)
    uav_i[:, K.I_PARTNER] = -1
    ugv_i[:, K.GI_PARTNER] = -1

    cx, cy = c.spot
    thrust = c.thrust_newton if c.thrust_newton is not None else c.uav_mass_kg * 9.8
    p_fly = flight_power(c.uav_speed_max, thrust, c.kappa1, c.kappa2, c.kappa3)
    p_hov = hover_power(c.uav_mass_kg, c.kappa2, c.kappa3)
    p_desc = descend_power(c.uav_descend_speed, c.uav_mass_kg, c.eps1, c.eps2, c.kappa3)
    p_asc = ascend_power(c.uav_ascend_speed, c.uav_mass_kg, c.eps1, c.eps2, c.kappa3)
    dt = c.slot_len

    for i in range(n):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0, i])))
        radius = c.task_radius * math.sqrt(rng.uniform())
        bearing = rng.uniform(0.0, 2.0 * math.pi)
        x = cx + radius * math.cos(bearing)
        y = cy + radius * math.sin(bearing)
        z = rng.uniform(c.uav_altitude_min, c.uav_altitude_max)
        soc = c.uav_capacity_wh * rng.uniform(c.uav_soc_frac_min, c.uav_soc_frac_max)
        uav_f[i, K.F_SOC] = soc
        uav_f[i, K.F_X] = x
        uav_f[i, K.F_Y] = y
        uav_f[i, K.F_Z] = z
        uav_f[i, K.F_HOME_X] = x
        uav_f[i, K.F_HOME_Y] = y
        uav_f[i, K.F_CRUISE_Z] = z
        uav_f[i, K.F_CAP] = c.uav_capacity_wh
        uav_f[i, K.F_SAT] = c.uav_sat_frac * c.uav_capacity_wh
        uav_f[i, K.F_DRAIN_FLY] = c.uav_discharge_eff * p_fly * dt / 3600.0
        uav_f[i, K.F_DRAIN_HOV] = c.uav_discharge_eff * p_hov * dt / 3600.0
        uav_f[i, K.F_DRAIN_DESC] = c.uav_discharge_eff * p_desc * dt / 3600.0
        uav_f[i, K.F_DRAIN_ASC] = c.uav_discharge_eff * p_asc * dt / 3600.0
        uav_f[i, K.F_STEP_XY] = c.uav_speed_max * dt
        uav_f[i, K.F_STEP_DOWN] = c.uav_descend_speed * dt
        uav_f[i, K.F_STEP_UP] = c.uav_ascend_speed * dt

    speeds = np.zeros(m)
    for j in range(m):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 1, j])))
        d = rng.uniform(c.ugv_distance_min, c.ugv_distance_max)
        bearing = rng.uniform(0.0, 2.0 * math.pi)
        ugv_f[j, K.G_X] = cx + d * math.cos(bearing)
        ugv_f[j, K.G_Y] = cy + d * math.sin(bearing)
        ugv_f[j, K.G_SUPPLY] = c.ugv_supply_wh
        speed = rng.uniform(c.ugv_speed_min_kmh, c.ugv_speed_max_kmh)
        ugv_i[j, K.GI_STATE] = K.UGV_IDLE
        # a static pad is the same draw pinned in place (paired comparison)
        if scheme == SCHEME_STATIC:
            speed = 0.0
        ugv_f[j, K.G_STEP] = (speed / 3.6) * dt
        speeds[j] = speed

    world = World(
        config=c,
        scheme=scheme,
        seed=seed,
        uav_f=uav_f,
        uav_i=uav_i,
        ugv_f=ugv_f,
        ugv_i=ugv_i,
        soc_alert=np.full(n, c.uav_alert_frac * c.uav_capacity_wh),
        eta_i=np.full(n, c.uav_discharge_eff),
        bidder=np.zeros(n, dtype=bool),
        excluded=np.zeros(n, dtype=bool),
        fail_count=np.zeros(n, dtype=np.int64),
        enqueue_slot=np.zeros(n, dtype=np.int64),
        phi_sum=np.zeros(n),
        rho_sum=np.zeros(n),
        sample_count=np.zeros(n, dtype=np.int64),
        ugv_speed_kmh=speeds,
        ugv_transfer_power=np.full(m, c.ugv_transfer_power_w),
        ugv_eta=np.full(m, c.ugv_transfer_eff),
    )
    return world


def advance_slot(world: World) -> World:
    """Advance one slot: physics step, then bidder bookkeeping."""
    K.step_world(world.uav_f, world.uav_i, world.ugv_f, world.ugv_i)

    c = world.config
    act = world.uav_i[:, K.I_ACT]
    rho = world.urgency()
    sensing = act == K.ACT_SENSE
    joining = sensing & ~world.bidder & ~world.excluded & (rho >= c.enter_urgency)
    world.enqueue_slot[joining] = world.clock
    world.bidder[joining] = True

    sampling = world.bidder & sensing
    world.phi_sum[sampling] += c.mu0 + c.mu1 * rho[sampling]
    world.rho_sum[sampling] += rho[sampling]
    world.sample_count[sampling] += 1

    world.clock += 1
    return world


def close_window(world: World, with_audit: bool = False):
    """Clear the pending window at the current slot boundary.

    Builds the market from queued bidders and idle vehicles, dispatches
    the configured scheme, schedules rendezvous for matched pairs, and
    re-queues losers. Returns (outcome, metrics row[, audit report]).
    """
    c = world.config
    spw = c.slots_per_window
    if world.clock % spw != 0 or world.clock == 0:
        raise ValueError(f"clock {world.clock} is not at a window boundary")
    world.window_count += 1
    window_id = world.window_count
    window_start = (window_id - 1) * spw * c.slot_len

    bidder_ids = np.flatnonzero(world.bidder & (world.sample_count > 0))
    phi_bars = {}
    rho_bars = {}
    bidders = []
    for i in bidder_ids:
        i = int(i)
        n_s = world.sample_count[i]
        # plain floats from here on: outcomes serialize to JSON/CSV
        phi_bars[i] = float(world.phi_sum[i] / n_s)
        rho_bars[i] = float(world.rho_sum[i] / n_s)
        submitted = float(max(world.enqueue_slot[i] * c.slot_len, window_start))
        bid = Bid(uav_id=i, window_id=window_id, amount=phi_bars[i], submitted_at=submitted)
        bidders.append(BidderInfo(world.uav_state(i), bid, phi_bars[i]))

    idle = np.flatnonzero(world.ugv_i[:, K.GI_STATE] == K.UGV_IDLE)
    qs = {int(j): world.ugv_qors(int(j)) for j in idle}
    ugvs = [world.ugv_state(int(j), qs[int(j)]) for j in idle]

    market = admit(bidders, ugvs, window_id)
    if world.scheme == SCHEME_OPTIMAL:
        outcome = optimal_scheme_outcome(market)  # may raise MarketTooLargeError
    else:
        outcome = run_auction(market)

    envy = non_envy_ratio(outcome, phi_bars) if phi_bars else None
    row = MetricsRow(
        scheme=world.scheme,
        ugv_count=c.ugv_count,
        tau=c.window_len,
        seed=world.seed,
        window=window_id,
        sl=satisfaction_level(outcome, rho_bars),
        uav_utility=sum(outcome.uav_utilities.values()),
        ugv_utility=sum(outcome.ugv_utilities.values()),
        surplus=outcome.social_surplus,
        non_envy_ratio=envy.all_participants if envy else 1.0,
        winners=outcome.num_winners,
    )

    # schedule matched pairs
    for m in outcome.winners:
        i, j = m.uav_id, m.ugv_id
        pad = (world.ugv_f[j, K.G_X], world.ugv_f[j, K.G_Y])
        meet = pad if world.scheme == SCHEME_STATIC else rendezvous(world.spot, pad)
        world.uav_i[i, K.I_ACT] = K.ACT_FLY_OUT
        world.uav_i[i, K.I_PARTNER] = j
        world.uav_f[i, K.F_TX] = meet[0]
        world.uav_f[i, K.F_TY] = meet[1]
        gain = (
            world.eta_i[i]
            * world.ugv_eta[j]
            * world.ugv_transfer_power[j]
            * c.slot_len
            / 3600.0
        )
        world.uav_f[i, K.F_CHARGE_GAIN] = gain
        # sender-side loss: the pad draws delivered/eta_j from its stock
        world.uav_f[i, K.F_SUPPLY_DRAW] = gain / world.ugv_eta[j]
        world.ugv_i[j, K.GI_PARTNER] = i
        if world.scheme == SCHEME_STATIC:
            world.ugv_i[j, K.GI_STATE] = K.UGV_SERVING
        else:
            world.ugv_i[j, K.GI_STATE] = K.UGV_ENROUTE
            world.ugv_f[j, K.G_TX] = meet[0]
            world.ugv_f[j, K.G_TY] = meet[1]
        world.bidder[i] = False
        world.fail_count[i] = 0

    for i in outcome.losers:
        world.fail_count[i] += 1
        if c.max_failed_windows > 0 and world.fail_count[i] >= c.max_failed_windows:
            # give up on the market; head for a fixed swap station instead
            world.bidder[i] = False
            world.excluded[i] = True

    # fresh valuation series for the next window
    world.phi_sum[:] = 0.0
    world.rho_sum[:] = 0.0
    world.sample_count[:] = 0

    if with_audit:
        report = audit_market(
            market,
            instance=f"{world.scheme}-seed{world.seed}-w{window_id}",
            outcome=outcome,
        )
        return outcome, row, report
    return outcome, row


def run_world(
    world: World,
    horizon_slots: Optional[int] = None,
    with_audit: bool = False,
    keep_outcomes: bool = False,
):
    """Run the horizon; returns (metrics rows, outcomes, audit reports)."""
    horizon = horizon_slots if horizon_slots is not None else world.config.horizon_slots
    spw = world.config.slots_per_window
    rows: list[MetricsRow] = []
    outcomes: list[AuctionOutcome] = []
    audits = []
    for _ in range(horizon):
        advance_slot(world)
        if world.clock % spw == 0:
            result = close_window(world, with_audit=with_audit)
            if with_audit:
                outcome, row, report = result
                audits.append(report)
            else:
                outcome, row = result
            rows.append(row)
            if keep_outcomes:
                outcomes.append(outcome)
    return rows, outcomes, audits


@dataclass
class ExperimentResult:
    rows: list[MetricsRow]
    aggregates: list[dict]
    errors: list[tuple[str, int, float, int, str]]  # scheme, J, tau, seed, message
    audits: list = field(default_factory=list)
    outcomes: list = field(default_factory=list)  # (scheme, seed, AuctionOutcome)


def run_experiment(
    config: ScenarioConfig,
    sweep: Mapping[str, Sequence],
    replications: int,
    schemes: Sequence[str] = ALL_SCHEMES,
    base_seed: int = 0,
    with_audit: bool = False,
    keep_outcomes: bool = False,
) -> ExperimentResult:
    """Grid x seeds x schemes Monte-Carlo sweep with per-cell fault capture.

    ``sweep`` maps ScenarioConfig field names to value lists; the full
    cartesian product is simulated for ``replications`` seeds
    (base_seed, base_seed+1, ...). Enumeration-guard breaches abort only
    their own cell and are reported in ``errors``.
    """
    keys = list(sweep.keys())
    rows: list[MetricsRow] = []
    errors = []
    audits = []
    outcomes = []
    for combo in itertools.product(*(sweep[k] for k in keys)):
        cfg = config.replace(**dict(zip(keys, combo)))
        for rep in range(replications):
            seed = base_seed + rep
            for scheme in schemes:
                world = generate_scenario(cfg, seed, scheme)
                try:
                    run_rows, run_outcomes, run_audits = run_world(
                        world, with_audit=with_audit, keep_outcomes=keep_outcomes
                    )
                except MarketTooLargeError as exc:
                    errors.append((scheme, cfg.ugv_count, cfg.window_len, seed, str(exc)))
                    continue
                rows.extend(run_rows)
                audits.extend(run_audits)
                outcomes.extend((scheme, seed, o) for o in run_outcomes)
    return ExperimentResult(
        rows=rows, aggregates=aggregate_rows(rows), errors=errors,
        audits=audits, outcomes=outcomes,
    )


METRICS_CSV_HEADER = (
    "scheme", "J", "tau", "seed", "window", "SL",
    "uav_utility", "ugv_utility", "surplus", "non_envy_ratio", "winners",
)


def metrics_row_tuple(row: MetricsRow) -> tuple:
    return (
        row.scheme, row.ugv_count, row.tau, row.seed, row.window, row.sl,
        row.uav_utility, row.ugv_utility, row.surplus, row.non_envy_ratio, row.winners,
    )


AGGREGATE_CSV_HEADER = (
    "scheme", "J", "tau", "windows",
    "SL_mean", "SL_sd", "uav_utility_mean", "uav_utility_sd",
    "ugv_utility_mean", "ugv_utility_sd", "surplus_mean", "surplus_sd",
    "non_envy_min", "non_envy_mean", "winners_mean",
)


def aggregate_rows(rows: Sequence[MetricsRow]) -> list[dict]:
    """Mean/sd of every metric, grouped by (scheme, J, tau)."""
    groups: dict[tuple, list[MetricsRow]] = {}
    for r in rows:
        groups.setdefault((r.scheme, r.ugv_count, r.tau), []).append(r)
    out = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[2])):
        rs = groups[key]
        sl = np.array([r.sl for r in rs])
        uu = np.array([r.uav_utility for r in rs])
        gu = np.array([r.ugv_utility for r in rs])
        sp = np.array([r.surplus for r in rs])
        ne = np.array([r.non_envy_ratio for r in rs])
        wn = np.array([r.winners for r in rs], dtype=float)
        out.append(
            {
                "scheme": key[0],
                "J": key[1],
                "tau": key[2],
                "windows": len(rs),
                "SL_mean": float(sl.mean()),
                "SL_sd": float(sl.std()),
                "uav_utility_mean": float(uu.mean()),
                "uav_utility_sd": float(uu.std()),
                "ugv_utility_mean": float(gu.mean()),
                "ugv_utility_sd": float(gu.std()),
                "surplus_mean": float(sp.mean()),
                "surplus_sd": float(sp.std()),
                "non_envy_min": float(ne.min()),
                "non_envy_mean": float(ne.mean()),
                "winners_mean": float(wn.mean()),
            }
        )
    return out
