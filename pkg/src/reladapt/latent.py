"""Bounded gradient-free ascent on a validity objective in embedding space.

Two-point simultaneous-perturbation slope estimates drive the walk; every
evaluated point is projected into the L2 ball around the starting embedding,
and the best evaluated point (the start included) is what comes back. The
result can therefore never be worse than doing nothing.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import ConfigError


@dataclass(frozen=True)
class LatentConfig:
    radius: float = 1.0
    step: float = 0.25
    probe: float = 0.05
    budget: int = 60
    seed: int = 0

    def __post_init__(self):
        if self.radius <= 0 or self.step <= 0 or self.probe <= 0:
            raise ConfigError("radius, step, and probe must be positive")
        if self.budget < 3:
            raise ConfigError("budget must allow the start plus one probe pair")


def _project(z, z0, radius: float):
    offset = [a - b for a, b in zip(z, z0)]
    norm = math.sqrt(math.fsum(d * d for d in offset))
    if norm <= radius:
        return tuple(z)
    scale = radius / norm
    return tuple(b + d * scale for b, d in zip(z0, offset))


def perturb_latent(z0, objective, cfg: LatentConfig):
    """Returns (z_best, f_best, evals_used) with ||z_best - z0|| <= radius
    and f_best >= f(z0)."""
    z0 = tuple(float(x) for x in z0)
    if not z0:
        raise ConfigError("embedding must have dimension >= 1")
    dim = len(z0)

    f0 = objective(z0)
    evals = 1
    best_z, best_f = z0, f0
    z = z0
    iteration = 0
    while evals + 2 <= cfg.budget:
        rng = random.Random(f"latent:{cfg.seed}:{iteration}")
        delta = [rng.choice((-1.0, 1.0)) for _ in range(dim)]
        plus = _project([a + cfg.probe * d for a, d in zip(z, delta)],
                        z0, cfg.radius)
        minus = _project([a - cfg.probe * d for a, d in zip(z, delta)],
                         z0, cfg.radius)
        f_plus = objective(plus)
        f_minus = objective(minus)
        evals += 2
        for candidate, value in ((plus, f_plus), (minus, f_minus)):
            if value > best_f:
                best_z, best_f = candidate, value
        slope = (f_plus - f_minus) / (2.0 * cfg.probe)
        z = _project([a + cfg.step * slope * d for a, d in zip(z, delta)],
                     z0, cfg.radius)
        iteration += 1
    return best_z, best_f, evals
