"""Smoke test for the `plap` extension module.

Build and install first:  maturin develop --release --features extension-module -m crates/python/Cargo.toml
"""

import math
import tempfile

import plap


def main():
    # closed forms; the support radius grows like (t + 1)^(1/4)
    r0 = plap.barenblatt_support_radius(0.0)
    r15 = plap.barenblatt_support_radius(15.0)
    assert abs(r15 / r0 - 2.0) < 1e-12, (r0, r15)
    assert plap.barenblatt(r0 * 1.01, 0.0) == 0.0
    assert abs(plap.lambda1_interval(2.0, 1.0) - math.pi**2) < 1e-9

    # eigenvalue routes agree
    g = plap.Grid.interval(0.0, 1.0, 1025)
    lam, phi = plap.lambda1_rayleigh(g, 3.0)
    shoot = plap.lambda1_shooting(3.0, 1.0)
    assert abs(lam - shoot) / shoot < 5e-3, (lam, shoot)
    assert min(phi) >= -1e-12

    # solve the heat-like problem from a sine bump and check the maximum principle
    g = plap.Grid.interval(-1.0, 1.0, 129)
    u0 = [math.cos(0.5 * math.pi * x) for x in g.nodes()]
    run = plap.solve(g, 3.0, u0, 0.2, 40)
    assert len(run.values()) == 41 and len(run.nodes()) == 129
    rep = plap.check_wmp(run)
    assert rep.verdict == "holds", rep
    below = plap.solve(g, 3.0, [0.5 * v for v in u0], 0.2, 40)
    assert plap.check_wcp(below, run).verdict == "holds"
    assert plap.check_wcp(run, below).verdict == "violated"

    # a scenario plus the status table
    with tempfile.TemporaryDirectory() as out:
        ok, text, path = plap.run_scenario("logistic-nonuniqueness", out, n=257, mt=200)
        assert ok, text
        table, csv = plap.table1_report(out)
        assert csv.startswith("regime,p,principle,empirical,paper")
    print("plap smoke test: ok")


if __name__ == "__main__":
    main()
