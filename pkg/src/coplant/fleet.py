"""Batch optimization of a fleet of plant sites.

Loads a plant registry CSV, runs the dispatch optimization per site with
site-specific renewable profiles, and assembles sorted cost-capacity curves
plus one-at-a-time capex sensitivity envelopes.

Plants CSV schema:   id,lat,lon,clinker_tpd,solar_ref,wind_ref
Profiles:            <profiles_dir>/<ref>.csv, one column of hourly capacity
                     factors with a one-line header.
"""

from __future__ import annotations

import csv
import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path

from coplant.costing import solution_abatement_cost
from coplant.dispatch import HOURS_PER_YEAR, solve_dispatch
from coplant.domain import RenewableSource, Scenario, SystemSpec

logger = logging.getLogger(__name__)

MIN_CLINKER_TPD = 2_500.0
MAX_CLINKER_TPD = 10_000.0
DEFAULT_UTILIZATION = 0.80

PLANTS_HEADER = ["id", "lat", "lon", "clinker_tpd", "solar_ref", "wind_ref"]

SENSITIVITY_PARAMETERS = ("solar_capex", "wind_capex", "electrolyzer_capex")


class PlantsSchemaError(ValueError):
    pass


@dataclass(frozen=True)
class PlantSite:
    id: str
    latitude: float
    longitude: float
    clinker_capacity: float      # t clinker per day
    solar_profile_ref: str
    wind_profile_ref: str
    capacity_utilization: float = DEFAULT_UTILIZATION

    def __post_init__(self) -> None:
        if not -90.0 <= self.latitude <= 90.0:
            raise PlantsSchemaError(f"{self.id}: latitude out of range")
        if not -180.0 <= self.longitude <= 180.0:
            raise PlantsSchemaError(f"{self.id}: longitude out of range")

    def cement_demand_tph(self, scenario: Scenario) -> float:
        """Average hourly cement delivery implied by capacity and utilization."""
        clinker_tph = self.clinker_capacity / 24.0
        return clinker_tph * scenario.cement_per_clinker * self.capacity_utilization


@dataclass
class PlantResult:
    plant: PlantSite
    abatement: float             # $/t CO2, transport and sequestration excluded
    cement_capacity: float       # t cement per year at the utilization rate
    flex_inflex_ratio: float     # flexible total cost over inflexible
    error: str | None = None


@dataclass
class FleetResult:
    per_plant: list[PlantResult]
    curve: list[tuple[float, float]]   # (cumulative cement t/yr, abatement $/t)

    @property
    def failures(self) -> list[PlantResult]:
        return [r for r in self.per_plant if r.error is not None]


def load_plants(csv_path: str | Path) -> list[PlantSite]:
    """Read and validate the registry; out-of-range capacities are dropped."""
    path = Path(csv_path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise PlantsSchemaError(f"{path}: file is empty") from None
        if [h.strip() for h in header] != PLANTS_HEADER:
            raise PlantsSchemaError(
                f"{path}: header {header} does not match {PLANTS_HEADER}")
        plants: list[PlantSite] = []
        excluded = 0
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(PLANTS_HEADER):
                raise PlantsSchemaError(f"{path}:{lineno}: expected "
                                        f"{len(PLANTS_HEADER)} columns, got {len(row)}")
            values = {}
            for col, cell in zip(PLANTS_HEADER, row):
                cell = cell.strip()
                if col in ("lat", "lon", "clinker_tpd"):
                    try:
                        values[col] = float(cell)
                    except ValueError:
                        raise PlantsSchemaError(
                            f"{path}:{lineno}: column '{col}' is not numeric: {cell!r}"
                        ) from None
                else:
                    values[col] = cell
            if not MIN_CLINKER_TPD <= values["clinker_tpd"] <= MAX_CLINKER_TPD:
                excluded += 1
                continue
            plants.append(PlantSite(
                id=values["id"], latitude=values["lat"], longitude=values["lon"],
                clinker_capacity=values["clinker_tpd"],
                solar_profile_ref=values["solar_ref"],
                wind_profile_ref=values["wind_ref"]))
    if excluded:
        logger.info("excluded %d plant(s) outside [%g, %g] t clinker/day",
                    excluded, MIN_CLINKER_TPD, MAX_CLINKER_TPD)
    return plants


def load_profile(profiles_dir: str | Path, ref: str, horizon: int) -> tuple[float, ...]:
    path = Path(profiles_dir) / f"{ref}.csv"
    if not path.exists():
        raise FileNotFoundError(f"profile '{ref}' not found at {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        next(reader)  # header
        values = [float(row[0]) for row in reader if row]
    if len(values) < horizon:
        raise ValueError(f"profile '{ref}' has {len(values)} hours, need {horizon}")
    return tuple(values[:horizon])


def _site_spec(template: SystemSpec, scenario: Scenario, plant: PlantSite,
               solar: tuple[float, ...], wind: tuple[float, ...]) -> SystemSpec:
    renewables = []
    for r in template.renewables:
        profile = solar if r.id == "solar" else wind if r.id == "wind" else r.profile
        renewables.append(dataclasses.replace(r, profile=profile))
    cement = plant.cement_demand_tph(scenario)
    return dataclasses.replace(
        template, renewables=tuple(renewables),
        demand_cement=cement, demand_methanol=cement / scenario.stoichiometry_x)


def _solve_plant(template: SystemSpec, scenario: Scenario, plant: PlantSite,
                 profiles_dir: str | Path) -> PlantResult:
    try:
        solar = load_profile(profiles_dir, plant.solar_profile_ref, scenario.horizon_hours)
        wind = load_profile(profiles_dir, plant.wind_profile_ref, scenario.horizon_hours)
        spec = _site_spec(template, scenario, plant, solar, wind)
        flex = solve_dispatch(spec, dataclasses.replace(scenario, flexibility_mode="flexible"))
        inflex = solve_dispatch(spec, dataclasses.replace(scenario,
                                                          flexibility_mode="inflexible"))
        scn = scenario
        abate = solution_abatement_cost(
            flex if scenario.flexibility_mode == "flexible" else inflex,
            spec, scn, include_transport=False)
        return PlantResult(
            plant=plant,
            abatement=abate,
            cement_capacity=plant.cement_demand_tph(scenario) * HOURS_PER_YEAR,
            flex_inflex_ratio=flex.objective / inflex.objective,
        )
    except Exception as exc:  # per-plant failures must not sink the batch
        logger.warning("plant %s failed: %s", plant.id, exc)
        return PlantResult(plant=plant, abatement=float("nan"), cement_capacity=0.0,
                           flex_inflex_ratio=float("nan"), error=str(exc))


def run_fleet(plants: list[PlantSite], template: SystemSpec, scenario: Scenario,
              profiles_dir: str | Path, workers: int = 1) -> FleetResult:
    """Optimize every site independently and sort the cost-capacity curve.

    Results are keyed/ordered by plant id, so shuffling the input list does
    not change the output.  With workers > 1, plants are solved in a process
    pool; the result order is still by plant id.
    """
    ordered = sorted(plants, key=lambda p: p.id)
    if workers > 1 and len(ordered) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                _solve_plant, [template] * len(ordered), [scenario] * len(ordered),
                ordered, [str(profiles_dir)] * len(ordered)))
    else:
        results = [_solve_plant(template, scenario, p, profiles_dir)
                   for p in ordered]
    succeeded = [r for r in results if r.error is None]
    if plants and not succeeded:
        raise RuntimeError("every plant in the fleet failed; see per-plant errors")
    curve = []
    cumulative = 0.0
    for r in sorted(succeeded, key=lambda r: (r.abatement, r.plant.id)):
        cumulative += r.cement_capacity
        curve.append((cumulative, r.abatement))
    return FleetResult(per_plant=results, curve=curve)


def _perturbed_template(template: SystemSpec, parameter: str, factor: float) -> SystemSpec:
    if parameter == "electrolyzer_capex":
        units = tuple(dataclasses.replace(u, capex=u.capex * factor)
                      if u.id == "electrolyzer" else u
                      for u in template.conversion_units)
        return dataclasses.replace(template, conversion_units=units)
    target = parameter.removesuffix("_capex")
    renewables = tuple(dataclasses.replace(r, capex=r.capex * factor)
                       if r.id == target else r for r in template.renewables)
    return dataclasses.replace(template, renewables=renewables)


@dataclass
class SensitivityCurves:
    baseline: list[tuple[float, float]]
    curves: dict[str, list[tuple[float, float]]]   # "solar_capex:+20%" -> curve
    envelope: list[tuple[float, float, float]]     # (capacity, min, max) pointwise


def sensitivity_sweep(plants: list[PlantSite], template: SystemSpec, scenario: Scenario,
                      profiles_dir: str | Path,
                      parameters: tuple[str, ...] = SENSITIVITY_PARAMETERS,
                      delta: float = 0.20) -> SensitivityCurves:
    """One-at-a-time +/-delta capex perturbations, with a min-max envelope."""
    for p in parameters:
        if p not in SENSITIVITY_PARAMETERS:
            raise ValueError(
                f"unknown sensitivity parameter {p!r}; valid: {SENSITIVITY_PARAMETERS}")
    baseline = run_fleet(plants, template, scenario, profiles_dir).curve
    curves: dict[str, list[tuple[float, float]]] = {}
    for p in parameters:
        for sign, label in ((1.0 + delta, f"{p}:+{delta:.0%}"),
                            (1.0 - delta, f"{p}:-{delta:.0%}")):
            perturbed = _perturbed_template(template, p, sign)
            curves[label] = run_fleet(plants, perturbed, scenario, profiles_dir).curve
    envelope = []
    all_curves = [baseline] + list(curves.values())
    for capacity, _ in baseline:
        costs = [_curve_value(c, capacity) for c in all_curves]
        envelope.append((capacity, min(costs), max(costs)))
    return SensitivityCurves(baseline=baseline, curves=curves, envelope=envelope)


def _curve_value(curve: list[tuple[float, float]], capacity: float) -> float:
    """Step-function view of a sorted cost-capacity curve."""
    for cum, cost in curve:
        if capacity <= cum + 1e-9:
            return cost
    return curve[-1][1]
