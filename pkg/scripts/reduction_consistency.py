"""Integrate every regular two-dimensional builtin in all three formulations and compare.

    python scripts/reduction_consistency.py [--t1 1 --dt 1e-3 --starts 3]
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from tangentforms.dynamics import integrate, phase_y_initial, project_and_compare, residual_along
from tangentforms.errors import TangentFormError
from tangentforms.form import classify, random_jet_points
from tangentforms.reduction import phase_lift
from tangentforms.registry import REGISTRY


@dataclass
class Config:
    t1: float = 1.0
    dt: float = 1e-3
    starts: int = 3
    seed: int = 0


def run(cfg: Config) -> None:
    rng = np.random.default_rng(cfg.seed)
    print(f"{'form':20s} {'3rd vs X':>10s} {'X vs Y':>10s} {'residual':>10s}")
    for name, entry in REGISTRY.items():
        f = entry.make()
        if f.m < 2:
            continue
        speed = max(entry.min_speed, 0.5)
        flags = classify(f, random_jet_points(f.m, 20, rng, min_speed=speed))
        if not flags.regular:
            print(f"{name:20s} {'not regular':>10s}")
            continue
        worst = np.zeros(3)
        for p in random_jet_points(f.m, cfg.starts, rng, order=2, min_speed=speed):
            try:
                s = phase_lift(f, p)
                a = integrate(f, "third_order", p.t, np.concatenate([p.x, p.y, p.z]), p.t + cfg.t1, cfg.dt)
                b = integrate(f, "x_flow", p.t, s.vector(), p.t + cfg.t1, cfg.dt)
                yx = "n/a"
                if flags.non_degenerated:
                    c = integrate(f, "y_flow", p.t, phase_y_initial(f, p.t, s.x, s.y, s.p), p.t + cfg.t1, cfg.dt)
                    worst[1] = max(worst[1], project_and_compare(b, c))
                    yx = None
                worst[0] = max(worst[0], project_and_compare(a, b))
                worst[2] = max(worst[2], residual_along(f, a))
            except (TangentFormError, ValueError) as exc:
                when = f" at t={exc.t:.3f}" if getattr(exc, "t", None) is not None else ""
                print(f"{name:20s} stopped{when}: {exc}")
                break
        else:
            mid = f"{worst[1]:10.2e}" if yx is None else f"{yx:>10s}"
            print(f"{name:20s} {worst[0]:10.2e} {mid} {worst[2]:10.2e}")


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--t1", type=float, default=Config.t1)
    ap.add_argument("--dt", type=float, default=Config.dt)
    ap.add_argument("--starts", type=int, default=Config.starts)
    ap.add_argument("--seed", type=int, default=Config.seed)
    a = ap.parse_args()
    run(Config(a.t1, a.dt, a.starts, a.seed))


if __name__ == "__main__":
    main()
