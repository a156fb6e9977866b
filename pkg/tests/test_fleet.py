import math

import numpy as np
import pytest

from voltfleet.fleet import (
    AllocationResult,
    DegradationParams,
    EvUnit,
    FleetState,
    allocate,
    battery_power_capability,
    fleet_available_power,
    mark_availability,
    step_battery,
)

DEG = DegradationParams()


def make_ev(soc=0.5, soh=0.95, capacity=75.0, c_rate=0.5, available=True):
    return EvUnit(
        capacity_kwh=capacity, soc=soc, soh=soh, c_rate_limit=c_rate, available=available
    )


def make_fleet(n, soc=0.5, soh=0.95, eta=0.96, availability=(1.0,) * 24):
    return FleetState(
        evs=[make_ev(soc=soc, soh=soh) for _ in range(n)],
        eta_inv=eta,
        availability_schedule=availability,
    )


def test_capability_current_limited():
    # 0.5 C-rate on a 75 kWh pack at soh 0.95
    assert battery_power_capability(make_ev()) == pytest.approx(35.625, abs=1e-12)


def test_capability_unavailable_is_zero():
    assert battery_power_capability(make_ev(available=False)) == 0.0


def test_capability_taper_at_rails():
    assert battery_power_capability(make_ev(soc=0.0), discharge=True) == 0.0
    assert battery_power_capability(make_ev(soc=1.0), discharge=False) == 0.0
    # half-taper at soc 0.05 discharging
    full = battery_power_capability(make_ev(soc=0.5))
    half = battery_power_capability(make_ev(soc=0.05))
    assert half == pytest.approx(0.5 * full, abs=1e-12)
    # taper applies only toward the rail being approached
    assert battery_power_capability(make_ev(soc=0.05), discharge=False) == pytest.approx(
        full, abs=1e-12
    )


def test_step_idle_calendar_aging_only():
    ev = make_ev()
    out = step_battery(ev, 0.0, 1.0, DEG)
    assert out.soc == ev.soc
    assert out.soh == pytest.approx(ev.soh - DEG.calendar_coeff, abs=1e-15)


def test_step_full_charge_hits_one():
    ev = make_ev(soc=0.5, soh=1.0, capacity=75.0)
    out = step_battery(ev, 37.5, 1.0, DEG)
    assert out.soc == 1.0  # 37.5 kWh into 75 kWh from half full


def test_step_full_discharge_hits_zero():
    ev = make_ev(soc=0.5, soh=1.0, capacity=75.0)
    out = step_battery(ev, -37.5, 1.0, DEG)
    assert out.soc == 0.0


def test_step_rejects_over_capability():
    with pytest.raises(ValueError):
        step_battery(make_ev(), -36.0, 1.0, DEG)  # capability is 35.625


def test_available_power_sums_capabilities():
    fleet = make_fleet(10)
    assert fleet_available_power(fleet, 0) == pytest.approx(356.25, abs=1e-9)


def test_available_power_zero_participation():
    fleet = make_fleet(10, availability=(0.0,) * 24)
    assert fleet_available_power(fleet, 5) == 0.0


def test_availability_floor_rule():
    fleet = make_fleet(20, availability=(0.45,) * 24)
    mark_availability(fleet, 0)
    assert sum(ev.available for ev in fleet.evs) == 9  # floor(0.45 * 20)


def test_availability_uses_fixed_order():
    fleet = make_fleet(4, availability=(0.5,) * 24)
    fleet.order = (2, 0, 3, 1)
    mark_availability(fleet, 0)
    assert [ev.available for ev in fleet.evs] == [True, False, True, False]


def test_allocate_three_four_five_feasible():
    fleet = make_fleet(15)  # 534.375 kW available >= 520.84
    res = allocate(300.0, 400.0, fleet, hour=0)
    assert res.rho == 1.0
    assert (res.p_sup_kw, res.q_sup_kvar) == (300.0, 400.0)
    assert res.p_fleet_kw == pytest.approx(500.0 / 0.96, abs=1e-9)


def test_allocate_half_capability_scales_to_half():
    # one oversized pack whose capability is exactly half of 500/0.96
    ev = EvUnit(capacity_kwh=3125.0 / 6.0, soc=0.5, soh=1.0, c_rate_limit=0.5)
    fleet = FleetState(evs=[ev], eta_inv=0.96)
    res = allocate(300.0, 400.0, fleet, hour=0)
    assert res.rho == pytest.approx(0.5, abs=1e-9)
    assert res.p_sup_kw == pytest.approx(150.0, abs=1e-9)
    assert res.q_sup_kvar == pytest.approx(200.0, abs=1e-9)


def test_allocate_zero_request_is_identity():
    fleet = make_fleet(3)
    soc_before = [ev.soc for ev in fleet.evs]
    res = allocate(0.0, 0.0, fleet, hour=0)
    assert res == AllocationResult(0.0, 0.0, 1.0, 0.0)
    for ev, soc in zip(fleet.evs, soc_before):
        assert ev.soc == soc
        assert ev.soh == pytest.approx(0.95 - DEG.calendar_coeff, abs=1e-15)


def test_allocate_preserves_power_factor():
    rng = np.random.default_rng(42)
    for _ in range(50):
        fleet = make_fleet(int(rng.integers(1, 8)), soc=float(rng.uniform(0.15, 0.95)))
        p = float(rng.uniform(-600, 600))
        q = float(rng.uniform(-500, 500))
        res = allocate(p, q, fleet, hour=int(rng.integers(0, 24)))
        if p != 0.0:
            assert res.q_sup_kvar / res.p_sup_kw == pytest.approx(q / p, rel=1e-12)


def test_rho_monotone_in_request_magnitude():
    rhos = []
    for scale in (0.5, 1.0, 2.0, 4.0):
        fleet = make_fleet(5)
        res = allocate(scale * 300.0, scale * 400.0, fleet, hour=0)
        rhos.append(res.rho)
    assert all(a >= b for a, b in zip(rhos, rhos[1:]))


def test_unit_efficiency_passthrough():
    fleet = make_fleet(15, eta=1.0)
    res = allocate(300.0, 400.0, fleet, hour=0)
    assert res.p_fleet_kw == pytest.approx(500.0, abs=1e-12)


def test_soc_bounds_and_soh_monotone_over_random_runs():
    rng = np.random.default_rng(7)
    fleet = make_fleet(6, soc=0.3)
    last_soh = [ev.soh for ev in fleet.evs]
    for step in range(200):
        p = float(rng.uniform(-800, 800))
        q = float(rng.uniform(-600, 600))
        allocate(p, q, fleet, hour=step % 24)
        for i, ev in enumerate(fleet.evs):
            assert 0.0 <= ev.soc <= 1.0
            assert ev.soh <= last_soh[i]
            last_soh[i] = ev.soh


def test_draw_never_exceeds_available_power():
    fleet = make_fleet(4, soc=0.12, availability=(0.5,) * 24)
    avail = fleet_available_power(fleet, 0)
    res = allocate(900.0, 700.0, fleet, hour=0)
    assert res.p_fleet_kw <= avail + 1e-9
    assert res.rho < 1.0
