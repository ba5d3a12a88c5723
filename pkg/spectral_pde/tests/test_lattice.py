import numpy as np
import pytest

from spectral_pde.models.grid import TimeGrid
from spectral_pde.models.transform import TransformKind
from spectral_pde.services.boundaries import spec_from_label
from spectral_pde.services.lattice import build_grid, build_wavenumbers, fft_index, half_shifted_points


def test_dst1_wavenumbers():
    k = build_wavenumbers("dst1", 21, np.pi / 20)
    np.testing.assert_allclose(k, np.arange(1, 20))


def test_dct1_wavenumbers_start_at_zero():
    k = build_wavenumbers("dct1", 21, np.pi / 20)
    np.testing.assert_allclose(k, np.arange(21))


@pytest.mark.parametrize("kind", ["dst3", "dct3"])
def test_mixed_wavenumbers(kind):
    k = build_wavenumbers(kind, 5, np.pi / 4)
    np.testing.assert_allclose(k, [0.5, 1.5, 2.5, 3.5])


def test_fft_index_inverts_ordering():
    n, dx = 12, 0.3
    k = build_wavenumbers("fft", n, dx)
    np.testing.assert_array_equal(fft_index(k, n, dx), np.arange(n))


def test_too_few_points():
    with pytest.raises(ValueError):
        build_wavenumbers("dst1", 3, 0.1)


def test_grid_geometry():
    grid = build_grid([(-2.0, 2.0)], 41, spec_from_label("DN"))
    assert grid.shape == (41,)
    assert grid.field_shape == (1, 41)
    assert grid.spacings[0] == pytest.approx(0.1)
    assert grid.volume_element == pytest.approx(0.1)
    assert grid.coordinates(0)[0] == -2.0
    assert grid.coordinates(0)[-1] == pytest.approx(2.0)
    assert grid.kinds == [[TransformKind.DST3]]


def test_components_get_their_own_transforms():
    grid = build_grid([(-3.0, 3.0)], 21, spec_from_label("DD;NN;ND"))
    assert grid.components == 3
    assert [kinds[0] for kinds in grid.kinds] == [TransformKind.DST1, TransformKind.DCT1, TransformKind.DCT3]
    assert [k[0].size for k in grid.wavenumbers] == [19, 21, 20]


def test_two_dimensional_grid():
    grid = build_grid([(0.0, 1.0), (0.0, 2.0)], [5, 9], spec_from_label("DD,PP"))
    assert grid.d == 2
    assert grid.field_shape == (1, 5, 9)
    x, y = grid.mesh()
    assert x.shape == (5, 1) and y.shape == (1, 9)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        build_grid([(0.0, 1.0)], [5, 5], spec_from_label("DD"))
    with pytest.raises(ValueError):
        build_grid([(0.0, 1.0), (0.0, 1.0)], 5, spec_from_label("DD"))


def test_half_shifted_points():
    np.testing.assert_allclose(half_shifted_points(4, 1.0), [0.125, 0.375, 0.625, 0.875])


class TestTimeGrid:
    def test_steps_and_times(self):
        time = TimeGrid(0.0, 1.0, 10, observe_every=5)
        assert time.dt == pytest.approx(0.1)
        assert time.times.size == 11
        np.testing.assert_allclose(time.observation_times, [0.0, 0.5, 1.0])

    @pytest.mark.parametrize("args", [(0.0, 1.0, 0), (1.0, 1.0, 5), (0.0, 1.0, 10, 3)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            TimeGrid(*args)
