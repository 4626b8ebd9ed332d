import numpy as np
import pytest

from esnlab.experiment import StudyConfig, build_esn, driven_pairs, lorenz_data


@pytest.fixture(scope="session")
def study_cfg():
    return StudyConfig()


@pytest.fixture(scope="session")
def ref_traj(study_cfg):
    """Default Lorenz trajectory covering washout + 20000 samples."""
    traj = lorenz_data(study_cfg, study_cfg.ref_length)
    traj.setflags(write=False)
    return traj


@pytest.fixture(scope="session")
def seed0_pairs(study_cfg, ref_traj):
    return driven_pairs(study_cfg, build_esn(study_cfg, 0), ref_traj)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
