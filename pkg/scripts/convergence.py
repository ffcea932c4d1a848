"""Convergence orders: RK4 on the harmonic example and the discrete action gradient.

    python scripts/convergence.py [--curves 5]
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

import numpy as np

from tangentforms import builtin
from tangentforms.dynamics import integrate
from tangentforms.form import Curve, JetPoint, action
from tangentforms.variational import el_residual


@dataclass
class Config:
    rk4_steps: tuple[int, ...] = (25, 50, 100, 200, 400)
    grid_sizes: tuple[int, ...] = (16, 32, 64, 128)
    curves: int = 5
    seed: int = 0
    eps: float = 1e-3


def rk4_study(cfg: Config) -> None:
    f = builtin("example2")
    ic = np.array([1, 0, 0, 1, -1, 0], dtype=float)
    print("RK4, example2, error after one period")
    prev = None
    for n in cfg.rk4_steps:
        err = float(np.abs(integrate(f, "third_order", 0, ic, 2 * math.pi, 2 * math.pi / n).final - ic).max())
        order = "" if prev is None else f"  order {math.log2(prev / err):.2f}"
        print(f"  n={n:5d}  error {err:.3e}{order}")
        prev = err


def _sine_curve(rng, m):
    a = rng.normal(size=(3, m))
    b = rng.uniform(0.5, 2.5, size=(3, m))
    c = rng.uniform(0, 2 * math.pi, size=(3, m))
    return lambda t, k: (a * b**k * np.sin(b * t + c + k * math.pi / 2)).sum(axis=0)


def gradient_error(form, d, N, eps):
    ts = np.linspace(0, 1, N + 1)
    xs = np.array([d(t, 0) for t in ts])
    k = N // 2
    t = ts[k]
    E = el_residual(form, JetPoint(t, d(t, 0), d(t, 1), d(t, 2), d(t, 3)))
    grad = np.empty(form.m)
    for i in range(form.m):
        up, dn = xs.copy(), xs.copy()
        up[k, i] += eps
        dn[k, i] -= eps
        grad[i] = (action(form, Curve(0, 1, up)) - action(form, Curve(0, 1, dn))) / (2 * eps)
    return float(np.abs(grad * N - E).max())


def action_study(cfg: Config) -> None:
    rng = np.random.default_rng(cfg.seed)
    print("discrete action: |grad S / dt - E| at t = 1/2")
    for name in ("example1", "example2", "example3", "example4"):
        f = builtin(name)
        errs = np.zeros(len(cfg.grid_sizes))
        for _ in range(cfg.curves):
            d = _sine_curve(rng, f.m)
            errs = np.maximum(errs, [gradient_error(f, d, N, cfg.eps) for N in cfg.grid_sizes])
        orders = [f"{math.log2(a / b):.2f}" if b > 1e-12 else "-" for a, b in zip(errs, errs[1:])]
        print(f"  {name}: errors {' '.join(f'{e:.2e}' for e in errs)}  orders {' '.join(orders)}")


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--curves", type=int, default=Config.curves)
    ap.add_argument("--seed", type=int, default=Config.seed)
    args = ap.parse_args()
    cfg = Config(curves=args.curves, seed=args.seed)
    rk4_study(cfg)
    action_study(cfg)


if __name__ == "__main__":
    main()
