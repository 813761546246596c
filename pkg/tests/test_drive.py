import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from assisted_tunneling.drive import (
    DriveRangeError, DriveSpec, G, bigY, read_drive_table, sigma_phase, zeta, zeta_squared_integral,
)

W = 1.048e-5
H = DriveSpec.harmonic(1e-27, W)
M = 18.888


def test_zeta_values():
    assert zeta(0.0, H) == 0
    assert zeta(math.pi / W, H) == pytest.approx(2 / W, rel=1e-14)
    assert zeta(2 * math.pi / W, H) == pytest.approx(0, abs=1e-10 / W)


def test_Y_values():
    assert bigY(0.0, H) == 0
    assert bigY(2 * math.pi / W, H) == pytest.approx(2 * math.pi / W**2, rel=1e-12)
    ts = np.linspace(0, 5 * math.pi / W, 2001)
    assert np.all(np.diff(bigY(ts, H)) >= 0)


def test_sigma_values():
    assert np.all(sigma_phase(np.linspace(-12, 12, 7), 3e5, DriveSpec.off(), M) == 0)
    assert np.all(sigma_phase(np.linspace(-12, 12, 7), 0.0, H, M) == 0)
    t = 2 * math.pi / W
    assert sigma_phase(0.0, t, H, M) == pytest.approx(H.mu**2 / (2 * M) * 3 * math.pi / W**3, rel=1e-10)


@given(st.floats(-12, 12), st.floats(0, 1e7))
def test_phase_purity(x, t):
    assert abs(np.exp(-1j * sigma_phase(x, t, H, M))) == pytest.approx(1.0, abs=1e-15)


@given(st.floats(1e3, 1e6))
def test_derivative_chain(t):
    h = min(1e-5 * t, 1e-4 / W)
    dY = (bigY(t + h, H) - bigY(t - h, H)) / (2 * h)
    dz = (zeta(t + h, H) - zeta(t - h, H)) / (2 * h)
    dS = (zeta_squared_integral(t + h, H) - zeta_squared_integral(t - h, H)) / (2 * h)
    assert dY == pytest.approx(zeta(t, H), rel=1e-8, abs=1e-8 * 2 / W)
    assert dz == pytest.approx(G(t, H), rel=1e-8, abs=1e-8)
    assert dS == pytest.approx(zeta(t, H) ** 2, rel=1e-8, abs=1e-8 * 4 / W**2)


def _tabulated(n):
    t = np.linspace(0, 2 * math.pi / W, n)
    return DriveSpec.tabulated(1e-27, t, np.sin(W * t))


def test_tabulated_converges_second_order():
    probe = np.linspace(0, 2 * math.pi / W, 37)
    errs = []
    for n in (201, 401, 801):
        d = _tabulated(n)
        errs.append(max(np.max(np.abs(zeta(probe, d) - zeta(probe, H))) * W,
                        np.max(np.abs(bigY(probe, d) - bigY(probe, H))) * W**2))
    assert errs[0] / errs[1] == pytest.approx(4, rel=0.1)
    assert errs[1] / errs[2] == pytest.approx(4, rel=0.1)


def test_tabulated_range_and_file(tmp_path):
    d = _tabulated(11)
    with pytest.raises(DriveRangeError):
        zeta(3 * math.pi / W, d)
    p = tmp_path / "g.csv"
    p.write_text("t_fm,G\n0,0\n1,0.5\n2,1\n")
    t, g = read_drive_table(p)
    assert list(g) == [0, 0.5, 1]
    bad = tmp_path / "bad.csv"
    bad.write_text("time,value\n0,0\n")
    with pytest.raises(ValueError):
        read_drive_table(bad)


def test_validation():
    with pytest.raises(ValueError):
        DriveSpec.harmonic(-1.0, W)
    with pytest.raises(ValueError):
        DriveSpec.harmonic(1.0, 0.0)
    with pytest.raises(ValueError):
        DriveSpec.tabulated(1.0, [1.0, 2.0], [0.0, 0.0])
    with pytest.raises(ValueError):
        zeta(-1.0, H)


def test_with_mu_and_active():
    assert not DriveSpec.off().active
    assert not H.with_mu(0.0).active
    assert H.with_mu(2.0).mu == 2.0 and H.with_mu(2.0).omega == W
    assert _tabulated(11).with_mu(3.0).shape == "tabulated"
