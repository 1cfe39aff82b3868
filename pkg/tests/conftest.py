import pytest

import tcm2d as t


def band_state(n=64, seed=0, lo=1, hi=4, eps=0.1, u_amp=1.0, v_amp=0.5, theta_amp=0.5):
    """Random band-limited state through the public preset path."""
    cfg = t.SimConfig(
        n=n,
        dt=1e-3,
        horizon=0.0,
        preset="random_band",
        eps=eps,
        band_lo=lo,
        band_hi=hi,
        u_amp=u_amp,
        v_amp=v_amp,
        theta_amp=theta_amp,
        seed=seed,
    )
    return t.make_initial(cfg)


def rel_l2(a, b):
    d = t.norm(a - b, "L2")
    s = t.norm(b, "L2")
    return d / s if s > 0 else d


@pytest.fixture(scope="session")
def std_run():
    """One medium-resolution regularized run shared across diagnostics tests."""
    cfg = t.SimConfig(
        n=64,
        dt=2e-3,
        horizon=0.5,
        preset="random_band",
        eps=0.1,
        band_lo=1,
        band_hi=4,
        u_amp=1.0,
        v_amp=0.5,
        theta_amp=0.5,
        seed=42,
        diag_stride=2,
        snap_stride=25,
    )
    return t.simulate(cfg)
