"""Shared fixtures: preset field sets and a random admissible-spec source."""
from __future__ import annotations

import numpy as np
import pytest

from dploop import assemble_fields, preset
from dploop.modes import ModeSpec, SolitonSpec

PRESET_NAMES = ("fig1", "fig2", "fig3", "fig4", "fig5")


@pytest.fixture(scope="session")
def preset_specs():
    return {name: preset(name).to_spec() for name in PRESET_NAMES}


@pytest.fixture(scope="session")
def preset_fields(preset_specs):
    return {name: assemble_fields(spec) for name, spec in preset_specs.items()}


def random_admissible_specs(count: int, seed: int) -> list[SolitonSpec]:
    """Deterministic stream of admissible one- and two-mode specs.

    kappa*k is drawn inside the loop band [2.1, 5] or the smooth band
    [0.15, 0.9]; two-mode draws keep |k1 - k2| >= 0.25 max(k) so the
    interaction constant delta stays well away from zero.
    """
    rng = np.random.default_rng(seed)
    out: list[SolitonSpec] = []
    while len(out) < count:
        n = int(rng.integers(1, 3))
        kappa = float(rng.uniform(0.6, 3.0))
        kinds = [rng.choice(["loop", "smooth"]) for _ in range(n)]
        ks = [
            float(rng.uniform(2.1, 5.0) if kind == "loop" else rng.uniform(0.15, 0.9))
            / kappa
            for kind in kinds
        ]
        if n == 2 and abs(ks[0] - ks[1]) < 0.25 * max(ks):
            continue
        modes = [
            ModeSpec(k=k, epsilon=-1 if kind == "loop" else +1, y0=float(rng.uniform(-2, 2)))
            for k, kind in zip(ks, kinds)
        ]
        out.append(SolitonSpec(kappa, modes))
    return out
