import math
import pathlib

import numpy as np
import pytest

import lowmach as lm

CONFIGS = pathlib.Path(__file__).resolve().parents[2] / "configs"


def small(model, eps=0.2, n=32, t_end=0.02):
    c = lm.RunConfig(model)
    c.epsilon = eps
    c.n_cells = n
    c.t_end = t_end
    c.output_stride = 1
    return c


def bisect_closure(Rp, Rm, sp, sm, gp, gm):
    def gap(a):
        return gp * math.log(Rp / a) + sp - gm * math.log(Rm / (1 - a)) - sm

    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_pressure_laws():
    assert lm.pressure_barotropic(1.5, 1.4) == pytest.approx(1.5**1.4, rel=1e-14)
    assert lm.pressure_entropic(1.5, -0.3, 1.4) == pytest.approx(math.exp(1.4 * math.log(1.5) - 0.3), rel=1e-14)
    assert lm.sound_speed(2.0, 0.0, 2.0) == pytest.approx(math.sqrt(2.0 * 2.0**1.0), rel=1e-14)


def test_closure_matches_bisection():
    rng = np.random.default_rng(7)
    for _ in range(200):
        gp, gm = rng.uniform(1.1, 3.0, 2)
        Rp, Rm = rng.uniform(0.1, 10.0, 2)
        sp, sm = rng.uniform(-1.0, 1.0, 2)
        sol = lm.equilibrium_closure(Rp, Rm, sp, sm, gp, gm)
        assert sol["alpha_plus"] == pytest.approx(bisect_closure(Rp, Rm, sp, sm, gp, gm), abs=1e-10)


def test_closure_symmetric():
    assert lm.equilibrium_closure(3.0, 3.0, 0.1, 0.1, 1.7, 1.7)["alpha_plus"] == 0.5


@pytest.mark.parametrize("model", ["M1", "M2", "M3", "M4", "M5", "M6", "M7"])
def test_short_run_conserves_mass_and_energy(model):
    c = small(model)
    traj = lm.simulate(c)
    first, last = traj.state(0), traj.state(-1)
    assert last.time == pytest.approx(c.t_end)
    for name in ("R_plus", "R_minus"):
        if name in lm.active_fields(model):
            m0, m1 = sum(first.field(name)), sum(last.field(name))
            assert abs(m1 - m0) <= 1e-12 * abs(m0)
    if model in ("M1", "M2", "M3", "M4"):
        ok, worst, msg = lm.energy_audit(traj, c)
        assert ok, msg
    else:
        e0 = lm.energy_total(first, c)["total"]
        assert lm.energy_total(last, c)["total"] <= 1.01 * e0
    for k in range(len(traj)):
        assert all(math.isfinite(v) for v in traj.state(k).field("R_plus"))


def test_strang_step_matches_simulate_one_step():
    c = small("M3")
    s0 = lm.make_well_prepared(c)
    s1 = lm.strang_step(s0, c)
    assert s1.time > 0.0
    c.t_end = s1.time
    traj = lm.simulate_from(c, s0)
    assert traj.steps == 1
    assert traj.state(-1).fields() == s1.fields()


def test_fit_order_exact_power_law():
    pts = [(e, 3.0 * e**2) for e in (0.2, 0.1, 0.05)]
    slope, _ = lm.fit_order(pts)
    assert slope == pytest.approx(2.0, abs=1e-12)


def test_config_round_trip_and_errors():
    c = lm.RunConfig.from_file(str(CONFIGS / "m4.cfg"))
    assert lm.RunConfig.from_text(c.to_text()) == c
    with pytest.raises(lm.ConfigError):
        lm.RunConfig.from_text("model = M9\n")
    text = small("M1", eps=1.0).to_text().replace("acoustic_mode = standing", "acoustic_mode = right_going")
    with pytest.raises(ValueError):
        lm.make_well_prepared(lm.RunConfig.from_text(text))


def test_mach_sweep_report():
    c = small("M2", n=32, t_end=0.01)
    rep = lm.mach_sweep(c, [0.2, 0.1, 0.05])
    assert [r["epsilon"] for r in rep["runs"]] == [0.2, 0.1, 0.05]
    assert rep["model"] == "M2" and "verdicts" in rep


def test_cli_print_model():
    assert lm.cli_main(["print-model", "--model", "M5"]) == 0
