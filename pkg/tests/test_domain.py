import math

import pytest
from hypothesis import given, strategies as st

from coplant import domain
from coplant.domain import (
    Commodity,
    ConversionUnit,
    DomainError,
    RenewableSource,
    Scenario,
    StorageUnit,
    SystemSpec,
    TransportCost,
)


class TestMinStoichiometry:
    def test_default_calibration(self):
        assert domain.min_stoichiometry(1.375, 0.4964) == pytest.approx(2.770, abs=0.005)

    def test_identity(self):
        assert domain.min_stoichiometry(1.0, 1.0) == 1.0

    def test_forced_arithmetic(self):
        assert domain.min_stoichiometry(2.0, 0.5) == 4.0

    def test_nonpositive_rejected(self):
        with pytest.raises(DomainError):
            domain.min_stoichiometry(0.0, 0.5)
        with pytest.raises(DomainError):
            domain.min_stoichiometry(1.375, -1.0)


class TestFeedRequirements:
    def test_unit_mass(self):
        req = domain.methanol_feed_requirements(1.0)
        assert req["co2"] == pytest.approx(1.375)
        assert req["h2"] == pytest.approx(0.1875)
        assert req["o2_byproduct"] == pytest.approx(1.489, abs=0.001)

    def test_zero(self):
        assert domain.methanol_feed_requirements(0.0) == {
            "co2": 0.0, "h2": 0.0, "o2_byproduct": 0.0}

    def test_large_scenario(self):
        req = domain.methanol_feed_requirements(84.7e6)
        assert req["co2"] == pytest.approx(116.46e6, rel=1e-3)

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            domain.methanol_feed_requirements(-1.0)

    @given(st.floats(0, 1e6), st.floats(0, 1e6))
    def test_linearity(self, a, b):
        fa = domain.methanol_feed_requirements(a)
        fb = domain.methanol_feed_requirements(b)
        fab = domain.methanol_feed_requirements(a + b)
        for key in fa:
            assert fab[key] == pytest.approx(fa[key] + fb[key], abs=1e-6)

    @given(st.floats(1e-9, 1e9))
    def test_o2_h2_ratio(self, mass):
        req = domain.methanol_feed_requirements(mass)
        assert req["o2_byproduct"] / req["h2"] == pytest.approx(7.94, abs=1e-12)


class TestNetzeroRequirement:
    def test_sum_rule(self):
        assert domain.netzero_sequestration_requirement(0.5, 1.375) == 1.875

    def test_zero(self):
        assert domain.netzero_sequestration_requirement(0.0, 0.0) == 0.0

    def test_default_capture_calibration(self):
        # uncaptured kiln CO2 per bundle with the default capture rate
        scn = Scenario(stoichiometry_x=2.77)
        uncaptured = (1 - scn.capture_rate) * scn.kiln_co2_per_t_clinker / \
            scn.cement_per_clinker * scn.stoichiometry_x
        assert uncaptured == pytest.approx(0.1044, abs=2e-3)
        total = domain.netzero_sequestration_requirement(0.1044, 1.375)
        assert total == pytest.approx(1.4794)

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            domain.netzero_sequestration_requirement(-0.1, 0.0)


class TestTypes:
    def test_profile_range_validated(self):
        with pytest.raises(DomainError):
            RenewableSource(id="bad", profile=(0.5, 1.2))

    def test_duplicate_ids_rejected(self):
        unit = ConversionUnit(id="u", outputs={Commodity.CEMENT: 1.0})
        with pytest.raises(DomainError):
            SystemSpec(conversion_units=(unit, unit), storage_units=(),
                       renewables=(), demand_cement=1.0, demand_methanol=0.0)

    def test_storage_efficiency_bounds(self):
        with pytest.raises(DomainError):
            StorageUnit(id="s", commodity=Commodity.ELECTRICITY, charge_eff=1.5)

    def test_transport_per_tonne(self):
        assert TransportCost().per_tonne == pytest.approx(8.7 + 5.8)

    def test_scenario_rejects_bad_capture(self):
        with pytest.raises(DomainError):
            Scenario(stoichiometry_x=5.0, capture_rate=1.5)

    def test_unit_lookup(self):
        unit = ConversionUnit(id="u", outputs={Commodity.CEMENT: 1.0})
        spec = SystemSpec(conversion_units=(unit,), storage_units=(),
                          renewables=(), demand_cement=1.0, demand_methanol=0.0)
        assert spec.unit("u") is unit
        with pytest.raises(KeyError):
            spec.unit("missing")

    def test_frozen(self):
        unit = ConversionUnit(id="u")
        with pytest.raises(Exception):
            unit.capex = 1.0


def test_constants_consistent():
    assert domain.CO2_PER_T_MEOH == pytest.approx(44 / 32, rel=1e-3)
    # default calibration reproduces the published minimum ratio
    assert math.isclose(
        domain.min_stoichiometry(), 2.770, abs_tol=0.005)
