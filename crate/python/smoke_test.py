"""Quick check of the installed uavcover extension module."""

import json
import math

import uavcover as u

SCENARIO = """
building.x_b = 30
building.y_b = 40
building.z_b = 60
radio.f_ghz = 2
radio.snr_min_db = 25
radio.noise_dbm = -120
radio.g_r_dir_db = 14.4
methods = FOBS, ABS, AUDA
sweep.r_far = 5, 10
seed = 7
mc.samples = 50000
voxel_size = 1
"""


def main():
    assert abs(u.volume_to_facade_ratio() - 0.451184464) < 1e-9
    gamma = u.gamma_ratio()
    assert abs(u.auda_fraction(u.Building(30, 40, 60), 10) - math.pi / 6 * (gamma**2 + gamma + 1)) < 1e-9

    s = u.Scenario.parse(SCENARIO)
    plans = {m: s.plan(m, r_far=10) for m in s.methods}
    for m, d in plans.items():
        mc = d.mc_coverage(n_samples=50000, seed=s.seed)
        print(f"{m:5s} uavs={len(d):3d} analytic={d.fraction:.4f} mc={mc['mc_fraction']:.4f} "
              f"+/-{mc['mc_halfwidth_95']:.4f} overlaps={mc['overlap_violations']}")
        assert mc["overlap_violations"] == 0
    assert plans["AUDA"].fraction > plans["FOBS"].fraction

    n, centers = u.max_circles(10, 40, 60)
    print(f"max_circles(10, 40, 60) = {n}")
    assert n == len(centers) == 6

    rows = s.power_csv(plans["AUDA"]).splitlines()
    print(f"AUDA total power {rows[-1].split(',')[-1]} mW")
    report = json.loads(s.evaluate_json(plans["AUDA"]))
    print(f"AUDA holes: {report['uncovered_voxels']} voxels in {len(report['hole_components'])} components")

    try:
        s.plan("AUDA")
    except ValueError:
        pass
    else:
        raise AssertionError("plan without a beam should fail")
    print("smoke test passed")


if __name__ == "__main__":
    main()
