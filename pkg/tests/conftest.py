import pytest

from dte_recon.channel import Detection
from dte_recon.recon import MonteCarloSettings, run_sweep

FIG_GRID = tuple(round(-6.0 + 0.5 * i, 1) for i in range(25))


@pytest.fixture(scope="session")
def fig_sweep():
    """Figure-reproduction sweep shared by the acceptance tests.

    Grid -6..+6 dB step 0.5, depths {2, 3, 4}, both detections, modulation
    variance 1 and excess noise 0.02; unreachable high-SNR points are
    skipped by design.
    """
    mc = MonteCarloSettings(n=10_000, repeats=12, seed=7)
    return run_sweep(FIG_GRID, (2, 3, 4),
                     (Detection.HETERODYNE, Detection.HOMODYNE),
                     mc, 1.0, 0.02, threads=4)
