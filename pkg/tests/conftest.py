"""Shared fixtures for the Monte Carlo studies.

The studies below take minutes each at desk scale, so they are session
scoped and shared between the module tests and the acceptance gate.
Everything is seeded; rerunning the suite reproduces the same tables.
"""
import time

import numpy as np
import pytest

from spectreg import (
    SamplerConfig,
    StudyConfig,
    WhittleBdpRegression,
    bvm_diagnostic,
    fit_dataset,
    run_study,
)
from spectreg.datasets import airpassengers_path
from spectreg.spectra import Ar1Spec, simulate_ts


def _mean_ar1_study(**overrides):
    base = dict(
        scenario="mean_ar1",
        rho=0.7,
        mu=1.0,
        n_list=(128,),
        replicates=200,
        level=0.90,
        seed=0,
    )
    base.update(overrides)
    return run_study(StudyConfig(**base))


@pytest.fixture(scope="session")
def study_rho07_n128():
    """Mean + AR(0.7) errors, all three fits, N=200 at n=128."""
    return _mean_ar1_study()


@pytest.fixture(scope="session")
def study_rho07_n256():
    """Same scenario at n=256; also feeds the coverage-ordering check."""
    return _mean_ar1_study(n_list=(256,))


@pytest.fixture(scope="session")
def study_rho07_n512_np():
    """Free-spectrum fit only at n=512 (third point of the trend in n)."""
    return _mean_ar1_study(n_list=(512,), error_model_fits=("NP",))


@pytest.fixture(scope="session")
def study_rho_neg07_wn():
    """Negatively correlated errors: the white-noise fit overcovers."""
    return _mean_ar1_study(rho=-0.7, error_model_fits=("WN",))


@pytest.fixture(scope="session")
def study_rho0_wn():
    """Correctly specified white-noise case, N=500 at n=256."""
    return _mean_ar1_study(
        rho=0.0, n_list=(256,), replicates=500, error_model_fits=("WN",)
    )


@pytest.fixture(scope="session")
def bvm_diag_by_n():
    """Gaussian-approximation diagnostics for 20 free-spectrum fits per n.

    Replicates reuse the study seed scheme (seed, n, replicate) so the
    datasets are disjoint from each other but reproducible.
    """
    truth = Ar1Spec(0.7, 1.0)
    out = {}
    for n in (128, 512):
        diags = []
        for rep in range(20):
            sim_seed, np_seed, _ = np.random.SeedSequence(entropy=(0, n, rep)).spawn(3)
            y = 1.0 + simulate_ts(truth, n, seed=sim_seed)
            est = WhittleBdpRegression(config=SamplerConfig(seed=np_seed)).fit(None, y)
            diags.append(bvm_diagnostic(est.chain_.theta_matrix(), est.model_, truth))
        out[n] = diags
    return out


@pytest.fixture(scope="session")
def airpassengers_fit():
    """Timed end-to-end case-study fit at the default 6000 retained draws."""
    t0 = time.perf_counter()
    report = fit_dataset(airpassengers_path(), log=True, seed=0)
    elapsed = time.perf_counter() - t0
    return report, elapsed


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    import _acceptance_report

    if not _acceptance_report.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_acceptance_report.LINES):
        terminalreporter.write_line(_acceptance_report.LINES[num])
