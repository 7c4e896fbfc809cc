"""Shared fixtures: the toy GTFS feed and the session-wide experiment runs.

The sweep and calibration fixtures are the expensive part of the suite
(hundreds of generated instances), so they are session-scoped and shared by
the acceptance criteria that read different aspects of the same runs.
"""

from __future__ import annotations

import math
import os
from dataclasses import replace
from pathlib import Path

import pytest

from stationcover.gen import GeneratorParams, generate
from stationcover.harness import PRESETS, derive_seed, run_sweep

JOBS = min(8, os.cpu_count() or 1)

CALIBRATION_BETAS = (2.5, 3.5, math.inf)
CALIBRATION_TEMPERATURES = (0.1, 0.5, 0.9)
CALIBRATION_SAMPLES = 10
MASTER_SEED = 1


@pytest.fixture(scope="session")
def gtfs_toy_dir() -> Path:
    return Path(__file__).parent / "data" / "gtfs_toy"


@pytest.fixture(scope="session")
def calibration_runs():
    """Main-config generations over the (beta, T) calibration grid, 10 seeds each."""
    runs = {}
    for beta in CALIBRATION_BETAS:
        for temperature in CALIBRATION_TEMPERATURES:
            cell = []
            for sample in range(CALIBRATION_SAMPLES):
                seed = derive_seed(MASTER_SEED, temperature, beta, sample)
                params = GeneratorParams(
                    n_stations=2000,
                    ratio=10.0,
                    target_delta_s=2.0,
                    beta=beta,
                    temperature=temperature,
                    seed=seed,
                )
                cell.append(generate(params))
            runs[(beta, temperature)] = cell
    return runs


@pytest.fixture(scope="session")
def thinned_main_sweep():
    return run_sweep(replace(PRESETS["thinned"], master_seed=MASTER_SEED), jobs=JOBS)


@pytest.fixture(scope="session")
def thinned_ratio4_sweep():
    config = replace(PRESETS["thinned"], ratio=4.0, master_seed=MASTER_SEED)
    return run_sweep(config, jobs=JOBS)


@pytest.fixture(scope="session")
def thinned_deg5_sweep():
    config = replace(PRESETS["thinned"], target_delta_s=5.0, master_seed=MASTER_SEED)
    return run_sweep(config, jobs=JOBS)
