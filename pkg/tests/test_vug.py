import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdpde.errors import ConfigurationError, NumericalBlowupError
from bdpde.particles import Ensemble, weak_sum
from bdpde.problems import allen_cahn
from bdpde.rngkit import split
from bdpde.vug import NonlinearTerm, deposit, tabulate_field


def ens(locs, weights, n0):
    return Ensemble(locs, weights, n0)


def test_deposit_single_particle():
    grid = deposit(ens([[0.05]], [2.0], 1), h=0.1)
    assert grid.n_cells == 1
    assert grid.indices[0, 0] == 0
    assert grid.values[0] == 2.0


def test_deposit_cancelling_cell_is_stored():
    grid = deposit(ens([[0.01], [0.09]], [1.0, -1.0], 2), h=0.1)
    assert grid.n_cells == 1
    assert grid.values[0] == 0.0


def test_deposit_floor_semantics():
    grid = deposit(ens([[-0.05]], [1.0], 1), h=0.1)
    assert grid.indices[0, 0] == -1


def test_deposit_rejects_bad_input():
    with pytest.raises(ConfigurationError):
        deposit(ens([[0.0]], [1.0], 1), h=0.0)
    with pytest.raises(ConfigurationError):
        deposit(Ensemble(np.empty((0, 1)), np.empty(0), 1), h=0.1)


def test_cell_average_values():
    grid = deposit(ens([[0.05]], [2.0], 1), h=0.1)
    assert grid.values_at([0.07])[0] == pytest.approx(20.0)
    assert grid.values_at([5.0])[0] == 0.0  # unoccupied cell is exactly zero


def test_cell_average_2d():
    locs = [[0.1, 0.1], [0.2, 0.2], [0.3, 0.3], [0.4, 0.4]]
    grid = deposit(ens(locs, [1.0] * 4, 4), h=0.5)
    assert grid.values_at([[0.25, 0.25]])[0] == pytest.approx(4.0 / (4 * 0.25))


def test_gradient_central_difference():
    # cell averages 0 (left of query) and 2 (right), h=0.1
    grid = deposit(ens([[0.15]], [0.2], 1), h=0.1)  # cell 1 holds average 2.0
    g = grid.gradient_at([0.05])  # query in cell 0; right neighbor avg 2, left 0
    assert g[0, 0] == pytest.approx((2.0 - 0.0) / 0.2)


def test_gradient_isolated_cell_and_symmetry():
    grid = deposit(ens([[0.05]], [1.0], 1), h=0.1)
    assert grid.gradient_at([0.05])[0, 0] == 0.0
    sym = deposit(ens([[-0.05], [0.05], [0.15]], [1.0, 5.0, 1.0], 3), h=0.1)
    assert sym.gradient_at([0.05])[0, 0] == 0.0


def test_gradient_exact_for_affine_cell_averages():
    # cell k holds average proportional to k: gradient must be exact inside
    h = 0.5
    ks = np.arange(-3, 4)
    locs = ((ks + 0.5) * h)[:, None]
    weights = ks.astype(float) * h  # average = k, with n0=1, h=0.5
    keep = weights != 0
    grid = deposit(ens(locs[keep], weights[keep], 1), h=h)
    # skip cell 0 (dropped by the zero-weight invariant); interior cells +-1
    for k in (-2, -1, 1, 2):
        g = grid.gradient_at([(k + 0.5) * h])[0, 0]
        assert g == pytest.approx(1.0 / h, rel=1e-12)  # d(average)/dx = 1/h


def test_l1_mass():
    # averages 3 and -2 with h=0.1, d=1, n0=1: |3|*0.1 + |-2|*0.1 = 0.5
    grid = deposit(ens([[0.05], [0.15]], [0.3, -0.2], 1), h=0.1)
    assert grid.l1_mass() == pytest.approx(0.5)


def test_l1_mass_benchmark_initial():
    from bdpde.problems import benchmark_1d

    prob = benchmark_1d()
    n = 1_000_000
    locs = prob.sample_initial(n, split(11, 0))
    grid = deposit(Ensemble(locs, np.full(n, prob.z0), n0=n), h=0.1)
    assert grid.l1_mass() == pytest.approx(1.75 * np.sqrt(np.pi), rel=0.01)


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    n=st.integers(min_value=1, max_value=500),
    d=st.integers(min_value=1, max_value=3),
    h=st.floats(min_value=0.05, max_value=2.0),
)
def test_deposit_conserves_total_weight(seed, n, d, h):
    rng = split(seed, 0)
    locs = rng.normal(scale=3.0, size=(n, d))
    weights = rng.normal(size=n)
    weights[weights == 0] = 1.0
    grid = deposit(Ensemble(locs, weights, n0=n), h)
    assert grid.values.sum() == pytest.approx(weights.sum(), rel=1e-10, abs=1e-12)


def test_deposit_matches_weak_sum_indicator():
    rng = split(3, 0)
    n = 1000
    locs = rng.normal(size=(n, 2))
    weights = rng.normal(size=n)
    weights[weights == 0] = 1.0
    ensb = Ensemble(locs, weights, n0=n)
    grid = deposit(ensb, h=0.5)
    for k in range(0, grid.n_cells, 7):
        idx = grid.indices[k]
        lo, hi = idx * 0.5, (idx + 1) * 0.5

        def indicator(x):
            return np.all((x >= lo) & (x < hi), axis=1).astype(float)

        expected = weak_sum(ensb, indicator)
        got = grid.values[k] / n
        assert got == pytest.approx(expected, rel=1e-10, abs=1e-12)


def test_storage_is_sparse():
    # two far-apart particles in 3-D: 2 cells, not a dense box
    grid = deposit(ens([[0.0, 0.0, 0.0], [100.0, 100.0, 100.0]], [1.0, 1.0], 2), h=0.1)
    assert grid.n_cells == 2


def test_tabulate_field_cubic():
    term = NonlinearTerm(lambda t, x, u, g: u - u**3)
    grid = deposit(ens([[0.05]], [0.1], 1), h=0.1)  # average 1.0
    fg = tabulate_field(grid, term, t=0.0)
    assert fg.values[0] == pytest.approx(0.0, abs=1e-14)
    grid2 = deposit(ens([[0.05]], [0.2], 1), h=0.1)  # average 2.0
    assert tabulate_field(grid2, term, 0.0).values[0] == pytest.approx(-6.0)


def test_tabulate_field_allen_cahn_matches_direct_formula():
    prob = allen_cahn(2)
    rng = split(5, 0)
    locs = prob.sample_initial(2000, rng)
    signs = np.sign(prob.u0(locs))
    signs[signs == 0] = 1.0
    grid = deposit(Ensemble(locs, prob.z0 * signs, 2000), h=0.4)
    fg = tabulate_field(grid, prob.nonlinear, t=0.0)
    k = grid.n_cells // 2
    center = (grid.indices[k] + 0.5) * 0.4
    u = grid.values[k] / (2000 * 0.4**2)
    from bdpde.problems import forcing_r

    direct = u - u**3 + forcing_r(center[None, :], 0.0, 2)[0]
    assert fg.values[k] == pytest.approx(direct, abs=1e-12)


def test_tabulate_field_blowup_names_cell():
    term = NonlinearTerm(lambda t, x, u, g: np.where(u > 10, np.inf, u))
    grid = deposit(ens([[0.05]], [2.0], 1), h=0.1)  # average 20
    with pytest.raises(NumericalBlowupError, match=r"\(0,\)"):
        tabulate_field(grid, term, 0.0)


def test_gradient_passed_to_field_when_requested():
    term = NonlinearTerm(lambda t, x, u, g: g[:, 0], uses_gradient=True)
    grid = deposit(ens([[0.05], [0.15]], [0.1, 0.3], 1), h=0.1)  # averages 1, 3
    fg = tabulate_field(grid, term, 0.0)
    # at cell 0: right avg 3, left 0 -> (3-0)/0.2 = 15
    assert fg.values[0] == pytest.approx(15.0)


def test_grid_csv_dump():
    grid = deposit(ens([[0.05, 0.15]], [2.0], 1), h=0.1)
    buf = io.StringIO()
    grid.dump_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "idx_1,idx_2,accumulated_weight,cell_average"
    assert lines[1].startswith("0,1,2.0,")
