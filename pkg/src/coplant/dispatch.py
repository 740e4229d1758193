"""Hourly capacity-sizing and operation LP for a co-production plant.

`build_lp` translates a (SystemSpec, Scenario) pair into a LinearProgram;
`extract_solution` maps an optimal LP solution back into typed ledgers.

Variable layout (in order), with U conversion units, S storage units,
R renewables and horizon T:

    capacities:   U + S + R
    activities:   U * T
    storage:      S * T charge, S * T discharge, S * T state of charge
    curtailment:  T            (present when R > 0)
    O2 venting:   T            (present when oxygen_gas can be produced)
    sequestration sink: T      (present when co2_sequestration can be produced)

For the canonical toy (1 renewable, 1 storage, 1 converter, T=24, no O2 or
sequestration commodities) this gives 3 + 24*4 + 24 = 123 variables.

All hourly costs are scaled by 8760/T so that the objective is $/yr for any
horizon length.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from coplant.domain import (
    Commodity,
    ConversionUnit,
    DomainError,
    Flexibility,
    Scenario,
    StorageUnit,
    SystemSpec,
)
from coplant.lp import EQ, GE, LE, LinearProgram, LpSolution

HOURS_PER_YEAR = 8760.0
BALANCE_TOL = 1e-6


class StructuralInfeasibility(ValueError):
    """A commodity is consumed but nothing in the system can supply it."""

    def __init__(self, commodity: Commodity):
        super().__init__(
            f"commodity '{commodity.value}' is consumed but has no possible supply "
            "(no producing unit, renewable, or import)")
        self.commodity = commodity


def capital_recovery_factor(rate: float, lifetime: float) -> float:
    """Annuity coefficient; the zero-rate limit is 1/lifetime."""
    if lifetime <= 0:
        raise DomainError("lifetime must be > 0")
    g = (1.0 + rate) ** lifetime
    if g == 1.0:  # rate 0 (or below float resolution): annuity limit
        return 1.0 / lifetime
    return rate * g / (g - 1.0)


def _is_pinned(unit: ConversionUnit, scenario: Scenario) -> bool:
    """Whether the unit's hourly activity is tied to its capacity."""
    if unit.flexibility is Flexibility.INFLEXIBLE:
        return True
    if Commodity.CLINKER in unit.outputs:
        return True  # the clinker kiln never modulates
    if Commodity.METHANOL in unit.outputs and scenario.flexibility_mode == "inflexible":
        return True
    return False


def _effective_ramp(unit: ConversionUnit) -> float:
    return unit.ramp_frac_per_hour


@dataclass
class DispatchIndex:
    """Deterministic variable numbering shared by builder and extractor."""

    spec: SystemSpec
    scenario: Scenario
    cap_unit: dict[str, int] = field(default_factory=dict)
    cap_store: dict[str, int] = field(default_factory=dict)
    cap_renew: dict[str, int] = field(default_factory=dict)
    act: dict[str, int] = field(default_factory=dict)      # uid -> first index
    charge: dict[str, int] = field(default_factory=dict)
    discharge: dict[str, int] = field(default_factory=dict)
    soc: dict[str, int] = field(default_factory=dict)
    curtail: int = -1
    vent_o2: int = -1
    seq: int = -1
    n_variables: int = 0

    @property
    def horizon(self) -> int:
        return self.scenario.horizon_hours

    @property
    def has_curtail(self) -> bool:
        return self.curtail >= 0

    @property
    def has_vent(self) -> bool:
        return self.vent_o2 >= 0

    @property
    def has_seq(self) -> bool:
        return self.seq >= 0


def _produced_commodities(spec: SystemSpec) -> set[Commodity]:
    out: set[Commodity] = set()
    for u in spec.conversion_units:
        out.update(u.outputs)
    if spec.renewables:
        out.add(Commodity.ELECTRICITY)
    return out


def _consumed_commodities(spec: SystemSpec) -> set[Commodity]:
    used: set[Commodity] = set()
    for u in spec.conversion_units:
        used.update(u.inputs)
    for s in spec.storage_units:
        if s.charge_electricity > 0 or s.discharge_electricity > 0:
            used.add(Commodity.ELECTRICITY)
    if spec.demand_cement > 0:
        used.add(Commodity.CEMENT)
    if spec.demand_methanol > 0:
        used.add(Commodity.METHANOL)
    return used


def build_index(spec: SystemSpec, scenario: Scenario) -> DispatchIndex:
    T = scenario.horizon_hours
    idx = DispatchIndex(spec=spec, scenario=scenario)
    n = 0
    for u in spec.conversion_units:
        idx.cap_unit[u.id] = n
        n += 1
    for s in spec.storage_units:
        idx.cap_store[s.id] = n
        n += 1
    for r in spec.renewables:
        idx.cap_renew[r.id] = n
        n += 1
    for u in spec.conversion_units:
        idx.act[u.id] = n
        n += T
    for s in spec.storage_units:
        idx.charge[s.id] = n
        n += T
    for s in spec.storage_units:
        idx.discharge[s.id] = n
        n += T
    for s in spec.storage_units:
        idx.soc[s.id] = n
        n += T
    if spec.renewables:
        idx.curtail = n
        n += T
    produced = _produced_commodities(spec)
    if Commodity.OXYGEN_GAS in produced:
        idx.vent_o2 = n
        n += T
    if Commodity.CO2_SEQUESTRATION in produced:
        idx.seq = n
        n += T
    idx.n_variables = n
    return idx


def _validate_inputs(spec: SystemSpec, scenario: Scenario) -> None:
    T = scenario.horizon_hours
    for r in spec.renewables:
        if len(r.profile) != T:
            raise DomainError(
                f"renewable '{r.id}' profile length {len(r.profile)} != horizon {T}")
    if spec.demand_methanol > 0:
        ratio = spec.demand_cement / spec.demand_methanol
        if abs(ratio - scenario.stoichiometry_x) > 1e-6 * max(1.0, scenario.stoichiometry_x):
            raise DomainError(
                f"demand ratio cement:methanol {ratio:.6f} does not match "
                f"scenario stoichiometry {scenario.stoichiometry_x:.6f}")
    produced = _produced_commodities(spec)
    for c in sorted(_consumed_commodities(spec), key=lambda c: c.value):
        if c is Commodity.BIOMASS:
            continue  # biomass is purchased, not produced on site
        if c not in produced:
            raise StructuralInfeasibility(c)


def build_lp(spec: SystemSpec, scenario: Scenario) -> LinearProgram:
    """Encode hourly commodity balances, storage dynamics, flexibility bounds
    and the annualized cost objective."""
    _validate_inputs(spec, scenario)
    idx = build_index(spec, scenario)
    T = scenario.horizon_hours
    scale = HOURS_PER_YEAR / T
    lp = LinearProgram()
    rate = scenario.discount_rate

    for u in spec.conversion_units:
        cost = (capital_recovery_factor(rate, u.lifetime) + u.fixed_om_frac) * u.capex
        lp.add_variable(f"cap:{u.id}", objective=cost)
    for s in spec.storage_units:
        cost = (capital_recovery_factor(rate, s.lifetime) + s.fixed_om_frac) * s.capex_capacity
        lp.add_variable(f"cap:{s.id}", objective=cost)
    for r in spec.renewables:
        cost = (capital_recovery_factor(rate, r.lifetime) + r.fixed_om_frac) * r.capex
        lp.add_variable(f"cap:{r.id}", objective=cost)
    for u in spec.conversion_units:
        hourly = (u.var_om + spec.biomass_price * u.inputs.get(Commodity.BIOMASS, 0.0)) * scale
        for t in range(T):
            lp.add_variable(f"act:{u.id}:{t}", objective=hourly)
    for s in spec.storage_units:
        for t in range(T):
            lp.add_variable(f"chg:{s.id}:{t}")
    for s in spec.storage_units:
        for t in range(T):
            lp.add_variable(f"dis:{s.id}:{t}")
    for s in spec.storage_units:
        for t in range(T):
            lp.add_variable(f"soc:{s.id}:{t}")
    if idx.has_curtail:
        for t in range(T):
            lp.add_variable(f"curtail:{t}")
    if idx.has_vent:
        for t in range(T):
            lp.add_variable(f"vent:{t}")
    if idx.has_seq:
        seq_cost = scenario.transport_cost.per_tonne * scale
        upper = np.inf if scenario.sequestration_allowed else 0.0
        for t in range(T):
            lp.add_variable(f"seq:{t}", upper=upper, objective=seq_cost)
    assert lp.n_variables == idx.n_variables

    balance_commodities = sorted(
        (_produced_commodities(spec) | _consumed_commodities(spec)) - {Commodity.BIOMASS},
        key=lambda c: c.value)

    for c in balance_commodities:
        for t in range(T):
            coeffs: list[tuple[int, float]] = []
            for u in spec.conversion_units:
                coef = u.outputs.get(c, 0.0) - u.inputs.get(c, 0.0)
                if coef != 0.0:
                    coeffs.append((idx.act[u.id] + t, coef))
            for s in spec.storage_units:
                if s.commodity is c:
                    coeffs.append((idx.discharge[s.id] + t, 1.0))
                    coeffs.append((idx.charge[s.id] + t, -1.0))
                if c is Commodity.ELECTRICITY:
                    if s.charge_electricity > 0:
                        coeffs.append((idx.charge[s.id] + t, -s.charge_electricity))
                    if s.discharge_electricity > 0:
                        coeffs.append((idx.discharge[s.id] + t, -s.discharge_electricity))
            if c is Commodity.ELECTRICITY:
                for r in spec.renewables:
                    cf = r.profile[t]
                    if cf > 0:
                        coeffs.append((idx.cap_renew[r.id], cf))
                if idx.has_curtail:
                    coeffs.append((idx.curtail + t, -1.0))
            if c is Commodity.OXYGEN_GAS and idx.has_vent:
                coeffs.append((idx.vent_o2 + t, -1.0))
            if c is Commodity.CO2_SEQUESTRATION and idx.has_seq:
                coeffs.append((idx.seq + t, -1.0))
            rhs = 0.0
            if c is Commodity.CEMENT:
                rhs = spec.demand_cement
            elif c is Commodity.METHANOL:
                rhs = spec.demand_methanol
            lp.add_constraint(f"bal:{c.value}:{t}", coeffs, EQ, rhs)

    for u in spec.conversion_units:
        cap = idx.cap_unit[u.id]
        pinned = _is_pinned(u, scenario)
        for t in range(T):
            a = idx.act[u.id] + t
            if pinned:
                lp.add_constraint(f"pin:{u.id}:{t}", [(a, 1.0), (cap, -1.0)], EQ, 0.0)
                continue
            lp.add_constraint(f"ub:{u.id}:{t}", [(a, 1.0), (cap, -1.0)], LE, 0.0)
            if u.min_load_frac > 0:
                lp.add_constraint(f"lb:{u.id}:{t}",
                                  [(a, 1.0), (cap, -u.min_load_frac)], GE, 0.0)
        ramp = _effective_ramp(u)
        if not pinned and ramp < 1.0:
            for t in range(T - 1):
                a0, a1 = idx.act[u.id] + t, idx.act[u.id] + t + 1
                lp.add_constraint(f"rup:{u.id}:{t}",
                                  [(a1, 1.0), (a0, -1.0), (cap, -ramp)], LE, 0.0)
                lp.add_constraint(f"rdn:{u.id}:{t}",
                                  [(a0, 1.0), (a1, -1.0), (cap, -ramp)], LE, 0.0)

    for s in spec.storage_units:
        cap = idx.cap_store[s.id]
        for t in range(T):
            nxt = (t + 1) % T
            if nxt == 0 and not s.cyclic:
                continue
            lp.add_constraint(
                f"soc:{s.id}:{t}",
                [(idx.soc[s.id] + nxt, 1.0), (idx.soc[s.id] + t, -1.0),
                 (idx.charge[s.id] + t, -s.charge_eff),
                 (idx.discharge[s.id] + t, 1.0 / s.discharge_eff)],
                EQ, 0.0)
        for t in range(T):
            lp.add_constraint(f"socub:{s.id}:{t}",
                              [(idx.soc[s.id] + t, 1.0), (cap, -1.0)], LE, 0.0)

    if scenario.net_zero and idx.has_seq:
        coeffs = [(idx.seq + t, 1.0) for t in range(T)]
        for u in spec.conversion_units:
            burden = u.co2_emitted + (u.inputs.get(Commodity.CO2_GAS, 0.0)
                                      if Commodity.METHANOL in u.outputs else 0.0)
            if burden > 0:
                coeffs.extend((idx.act[u.id] + t, -burden) for t in range(T))
        lp.add_constraint("netzero", coeffs, GE, 0.0)

    return lp


@dataclass
class DispatchSolution:
    """Typed view of an optimal dispatch: capacities, hourly ledgers, costs."""

    horizon: int
    capacities: dict[str, float]
    activity: dict[str, np.ndarray]
    charge: dict[str, np.ndarray]
    discharge: dict[str, np.ndarray]
    soc: dict[str, np.ndarray]
    curtailment: np.ndarray
    vented_o2: np.ndarray
    emitted_co2: np.ndarray
    sequestered_co2: np.ndarray
    objective: float

    @property
    def annual_scale(self) -> float:
        return HOURS_PER_YEAR / self.horizon

    def annual(self, hourly: np.ndarray) -> float:
        return float(np.sum(hourly)) * self.annual_scale

    @property
    def annual_sequestered(self) -> float:
        return self.annual(self.sequestered_co2)

    @property
    def annual_emitted(self) -> float:
        return self.annual(self.emitted_co2)


def hourly_utilized_co2(spec: SystemSpec, solution: DispatchSolution) -> np.ndarray:
    """CO2 routed into methanol synthesis each hour."""
    out = np.zeros(solution.horizon)
    for u in spec.conversion_units:
        if Commodity.METHANOL in u.outputs and Commodity.CO2_GAS in u.inputs:
            out += u.inputs[Commodity.CO2_GAS] * solution.activity[u.id]
    return out


def hourly_captured_co2(spec: SystemSpec, solution: DispatchSolution) -> np.ndarray:
    """CO2 captured from kiln flue gas each hour (co2_gas produced by units)."""
    out = np.zeros(solution.horizon)
    for u in spec.conversion_units:
        if Commodity.CO2_GAS in u.outputs:
            out += u.outputs[Commodity.CO2_GAS] * solution.activity[u.id]
    return out


def commodity_balance(spec: SystemSpec, scenario: Scenario, solution: DispatchSolution,
                      commodity: Commodity) -> dict[str, np.ndarray]:
    """Signed hourly ledger for one commodity: positive = supply, negative = use."""
    T = solution.horizon
    terms: dict[str, np.ndarray] = {}

    def _add(label: str, series: np.ndarray) -> None:
        if np.any(series != 0.0):
            terms[label] = series

    for u in spec.conversion_units:
        coef = u.outputs.get(commodity, 0.0) - u.inputs.get(commodity, 0.0)
        if coef != 0.0:
            _add(u.id, coef * solution.activity[u.id])
    for s in spec.storage_units:
        if s.commodity is commodity:
            _add(f"{s.id}:discharge", solution.discharge[s.id])
            _add(f"{s.id}:charge", -solution.charge[s.id])
        if commodity is Commodity.ELECTRICITY:
            overhead = (s.charge_electricity * solution.charge[s.id]
                        + s.discharge_electricity * solution.discharge[s.id])
            _add(f"{s.id}:processing", -overhead)
    if commodity is Commodity.ELECTRICITY:
        for r in spec.renewables:
            _add(r.id, solution.capacities[r.id] * np.asarray(r.profile))
        _add("curtailment", -solution.curtailment)
    if commodity is Commodity.OXYGEN_GAS:
        _add("vented", -solution.vented_o2)
    if commodity is Commodity.CO2_SEQUESTRATION:
        _add("sequestration", -solution.sequestered_co2)
    if commodity is Commodity.CEMENT and spec.demand_cement > 0:
        _add("demand", np.full(T, -spec.demand_cement))
    if commodity is Commodity.METHANOL and spec.demand_methanol > 0:
        _add("demand", np.full(T, -spec.demand_methanol))
    if commodity is Commodity.BIOMASS and terms:
        # biomass is bought on the open market, not produced in-system
        _add("purchase", -np.sum(list(terms.values()), axis=0))
    return terms


def extract_solution(spec: SystemSpec, scenario: Scenario,
                     lp_solution: LpSolution) -> DispatchSolution:
    """Map an optimal LP solution back into ledgers and verify every balance."""
    lp_solution.require_optimal()
    idx = build_index(spec, scenario)
    T = scenario.horizon_hours
    x = np.asarray(lp_solution.x)
    if x.shape[0] != idx.n_variables:
        raise ValueError(
            f"solution has {x.shape[0]} values, expected {idx.n_variables}")

    sol = DispatchSolution(
        horizon=T,
        capacities={uid: float(x[j]) for uid, j in
                    {**idx.cap_unit, **idx.cap_store, **idx.cap_renew}.items()},
        activity={uid: x[j:j + T].copy() for uid, j in idx.act.items()},
        charge={sid: x[j:j + T].copy() for sid, j in idx.charge.items()},
        discharge={sid: x[j:j + T].copy() for sid, j in idx.discharge.items()},
        soc={sid: x[j:j + T].copy() for sid, j in idx.soc.items()},
        curtailment=(x[idx.curtail:idx.curtail + T].copy() if idx.has_curtail
                     else np.zeros(T)),
        vented_o2=(x[idx.vent_o2:idx.vent_o2 + T].copy() if idx.has_vent
                   else np.zeros(T)),
        emitted_co2=np.zeros(T),
        sequestered_co2=(x[idx.seq:idx.seq + T].copy() if idx.has_seq
                         else np.zeros(T)),
        objective=float(lp_solution.objective),
    )
    for u in spec.conversion_units:
        if u.co2_emitted > 0:
            sol.emitted_co2 = sol.emitted_co2 + u.co2_emitted * sol.activity[u.id]

    verify_balances(spec, scenario, sol)
    return sol


def verify_balances(spec: SystemSpec, scenario: Scenario, solution: DispatchSolution,
                    tol: float = BALANCE_TOL) -> None:
    """Check every commodity/hour residual against the declared tolerance."""
    commodities = sorted(
        (_produced_commodities(spec) | _consumed_commodities(spec)) - {Commodity.BIOMASS},
        key=lambda c: c.value)
    for c in commodities:
        terms = commodity_balance(spec, scenario, solution, c)
        if not terms:
            continue
        stack = np.vstack(list(terms.values()))
        residual = np.abs(stack.sum(axis=0))
        limit = tol * np.maximum(1.0, np.abs(stack).max(axis=0))
        worst = int(np.argmax(residual - limit))
        if residual[worst] > limit[worst]:
            raise ValueError(
                f"balance violated for {c.value} at hour {worst}: "
                f"residual {residual[worst]:.3e} > {limit[worst]:.3e}")


def solve_dispatch(spec: SystemSpec, scenario: Scenario) -> DispatchSolution:
    """Convenience wrapper: build, solve, extract."""
    from coplant.lp import solve_lp

    lp = build_lp(spec, scenario)
    res = solve_lp(lp)
    res.require_optimal()
    return extract_solution(spec, scenario, res)
