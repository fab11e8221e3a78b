"""Synthetic field collections for the correspondence, classification and
temporal experiments.

Every generator is a pure function of its arguments: noise and random
parameters are drawn from ``PCG64(seed)`` streams.
"""

from __future__ import annotations

import math

import numpy as np

from .field import ScalarField, gen_gaussian_mixture, gen_sine_mixture

__all__ = [
    "SINE_FREQ1",
    "SINE_FREQ2",
    "sine_source",
    "sn_pair",
    "rotating_gaussians",
    "random_gaussians",
    "gaussian_collection",
    "temporal_series",
]

# 3x3 grid of interior maxima on the unit square
SINE_FREQ1 = (2.75, 0.0)
SINE_FREQ2 = (0.0, 2.75)


def sine_source(rows: int = 128, cols: int = 128) -> ScalarField:
    return gen_sine_mixture(rows, cols, SINE_FREQ1, SINE_FREQ2, 0.0, 0)


def sn_pair(rows: int = 128, cols: int = 128, noise_amp: float = 0.3, seed: int = 1):
    """Source sum-of-sines field and the same field with uniform noise added."""
    src = sine_source(rows, cols)
    tgt = gen_sine_mixture(rows, cols, SINE_FREQ1, SINE_FREQ2, noise_amp, seed)
    return src, tgt


def _ring(n_components: int, radius: float, sigma: float):
    """Equal bumps evenly spaced on a circle about the domain center."""
    return [
        (
            (0.5 + radius * math.cos(2 * math.pi * k / n_components), 0.5 + radius * math.sin(2 * math.pi * k / n_components)),
            sigma,
            1.0,
        )
        for k in range(n_components)
    ]


def rotating_gaussians(
    n_components: int,
    n_angles: int = 100,
    rows: int = 48,
    radius: float = 0.22,
    sigma: float = 0.1,
    noise_amp: float = 0.02,
    seed: int = 0,
) -> list[ScalarField]:
    """A fixed mixture rotated at ``n_angles`` evenly spaced angles in [0, 2pi)."""
    comps = _ring(n_components, radius, sigma)
    out = []
    for k in range(n_angles):
        theta = 2 * math.pi * k / n_angles
        f = gen_gaussian_mixture(rows, rows, comps, theta, noise_amp, seed * 100_003 + k)
        out.append(f)
    return out


def random_gaussians(
    n_components: int,
    n_instances: int = 100,
    rows: int = 48,
    sigma_range=(0.05, 0.15),
    margin: float = 0.1,
    min_separation: float = 0.25,
    noise_amp: float = 0.02,
    seed: int = 0,
) -> list[ScalarField]:
    """Mixtures with uniformly random centers and bandwidths.

    Centers are redrawn until all pairs are ``min_separation`` apart, so
    that bumps rarely merge into a single maximum.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    for k in range(n_instances):
        while True:
            centers = rng.uniform(margin, 1.0 - margin, size=(n_components, 2))
            gaps = [np.hypot(*(centers[i] - centers[j])) for i in range(n_components) for j in range(i)]
            if not gaps or min(gaps) >= min_separation:
                break
        sigmas = rng.uniform(*sigma_range, size=n_components)
        comps = [(tuple(c), float(s), 1.0) for c, s in zip(centers, sigmas)]
        out.append(gen_gaussian_mixture(rows, rows, comps, 0.0, noise_amp, seed * 100_003 + 7919 + k))
    return out


def gaussian_collection(kind: str, seed: int = 0, n_per_class: int = 100, rows: int = 48, noise_amp: float = 0.02):
    """Binary + trinary instances with labels 0 (binary) and 1 (trinary)."""
    if kind == "rotating":
        fields = rotating_gaussians(2, n_per_class, rows, noise_amp=noise_amp, seed=seed)
        fields += rotating_gaussians(3, n_per_class, rows, noise_amp=noise_amp, seed=seed + 1)
    elif kind == "random":
        fields = random_gaussians(2, n_per_class, rows, noise_amp=noise_amp, seed=2 * seed)
        fields += random_gaussians(3, n_per_class, rows, noise_amp=noise_amp, seed=2 * seed + 1)
    else:
        raise ValueError(f"unknown Gaussian collection {kind!r}")
    labels = [0] * n_per_class + [1] * n_per_class
    return fields, labels


# bump schedule of the temporal series: (center, birth step, death step)
_TEMPORAL_BUMPS = [
    ((0.25, 0.3), 0, 11),
    ((0.75, 0.3), 0, 11),
    ((0.5, 0.72), 0, 11),
    ((0.32, 0.75), 4, 11),
    ((0.68, 0.72), 8, 11),
]


def temporal_series(n_steps: int = 11, rows: int = 64, drift: float = 0.006, noise_amp: float = 0.01, seed: int = 0):
    """Slowly drifting bumps whose count changes at steps 4 and 8.

    Returns the fields and the block index of every step; topology is
    constant within a block and changes across blocks.
    """
    fields, blocks = [], []
    for t in range(n_steps):
        comps = []
        for (cu, cv), birth, death in _TEMPORAL_BUMPS:
            if birth <= t < death:
                comps.append(((cu + drift * t, cv + 0.5 * drift * t), 0.09, 1.0))
        f = gen_gaussian_mixture(rows, rows, comps, 0.0, noise_amp, seed * 1000 + t)
        fields.append(ScalarField(f.values, name=f"t{t:02d}"))
        blocks.append(sum(t >= b for b in (4, 8)))
    return fields, blocks
