import pytest

from softeq.channel import DEFAULT_A3_GRID, default_nonlinear_profile
from softeq.trainer import VARIANTS, ExperimentConfig, sweep


@pytest.fixture(scope="session")
def reference_sweep():
    """The committed full-scale reference experiment: 4 nonlinearity points
    x 5 variants, 200k training + 200k evaluation symbols per cell, at the
    stock TrainingParams (the defaults ARE the reference configuration).

    This is the expensive fixture behind the acceptance tests (tens of
    minutes on one core); everything else in the suite stays desk scale.
    """
    base = ExperimentConfig(
        m=3,
        channel=default_nonlinear_profile(),
        tap_count=17,
        variant="eq_mse",
        run_seed=0,
        n_frames=2,
        frame_len=200_000,
    )
    return sweep(base, list(DEFAULT_A3_GRID), list(VARIANTS))
