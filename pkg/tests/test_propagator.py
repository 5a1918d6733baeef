"""Midpoint-exponential propagation: unitarity, conservation, convergence."""

import numpy as np
import pytest

from qgeom.errors import UsageError
from qgeom.linalg import SIGMA_X, SIGMA_Z, random_hermitian, random_state
from qgeom.propagator import CoarseGridWarning, constant_H_energy_drift, propagate
from qgeom.schedules import ConstantSchedule, FourierSchedule, TimeGrid

KET0 = np.array([1, 0], dtype=complex)
PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)


def fourier_test_schedule(seed=33, dim=2):
    rng = np.random.default_rng(seed)
    return FourierSchedule(random_hermitian(dim, 0.5, rng),
                           ((random_hermitian(dim, 0.5, rng),
                             random_hermitian(dim, 0.5, rng), 2.0),))


class TestPropagate:
    def test_eigenstate_stays_put(self):
        traj = propagate(ConstantSchedule(SIGMA_Z), KET0, TimeGrid(0, 2, 201))
        overlaps = np.abs(traj.states @ KET0.conj())
        assert np.max(np.abs(overlaps - 1.0)) < 1e-10

    def test_rabi_closed_form(self):
        # H = sigma_x flips |0> -> |1> with population sin^2(t)
        grid = TimeGrid(0, np.pi / 2, 501)
        traj = propagate(ConstantSchedule(SIGMA_X), KET0, grid)
        for i, t in enumerate(grid.times()):
            pop1 = abs(traj.states[i][1]) ** 2
            assert pop1 == pytest.approx(np.sin(t) ** 2, abs=1e-9)
        assert abs(traj.states[-1][1]) ** 2 == pytest.approx(1.0, abs=1e-10)

    def test_richardson_halving(self):
        # Halving dt must shrink the endpoint error (vs a dt/8 reference) by >= 3.6
        sched = fourier_test_schedule()
        psi0 = random_state(2, np.random.default_rng(1))

        def endpoint(steps):
            return propagate(sched, psi0, TimeGrid(0, 1, steps)).states[-1]

        ref = endpoint(1601)  # dt/8 relative to the coarse run
        coarse = np.linalg.norm(endpoint(201) - ref)
        fine = np.linalg.norm(endpoint(401) - ref)
        assert coarse / fine >= 3.6

    def test_self_convergence_order(self):
        sched = fourier_test_schedule(seed=9, dim=3)
        psi0 = random_state(3, np.random.default_rng(2))
        ref = propagate(sched, psi0, TimeGrid(0, 1, 3201)).states[-1]
        errs, dts = [], []
        for steps in (101, 201, 401, 801):
            grid = TimeGrid(0, 1, steps)
            errs.append(np.linalg.norm(propagate(sched, psi0, grid).states[-1] - ref))
            dts.append(grid.dt)
        slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
        assert slope >= 1.9

    def test_norm_preserved(self):
        sched = fourier_test_schedule(seed=12, dim=4)
        psi0 = random_state(4, np.random.default_rng(3))
        traj = propagate(sched, psi0, TimeGrid(0, 1, 101))
        norms = np.linalg.norm(traj.states, axis=1)
        assert np.max(np.abs(norms - 1.0)) < 1e-10

    def test_initial_state_kept(self):
        psi0 = random_state(2, np.random.default_rng(4))
        traj = propagate(ConstantSchedule(SIGMA_Z), psi0, TimeGrid(0, 1, 11))
        assert np.allclose(traj.states[0], psi0)

    def test_dim_mismatch(self):
        with pytest.raises(UsageError):
            propagate(ConstantSchedule(SIGMA_Z), np.ones(3, dtype=complex),
                      TimeGrid(0, 1, 11))

    def test_coarse_grid_warning(self):
        with pytest.warns(CoarseGridWarning):
            propagate(ConstantSchedule(10 * SIGMA_Z), PLUS, TimeGrid(0, 1, 3))


class TestEnergyDrift:
    def test_sigma_z_plus(self):
        traj = propagate(ConstantSchedule(SIGMA_Z), PLUS, TimeGrid(0, 1, 1000))
        assert constant_H_energy_drift(traj) <= 1e-10

    def test_sigma_x_random_state(self):
        psi0 = random_state(2, np.random.default_rng(6))
        traj = propagate(ConstantSchedule(SIGMA_X), psi0, TimeGrid(0, 1, 500))
        assert constant_H_energy_drift(traj) <= 1e-10

    def test_random_4x4(self):
        rng = np.random.default_rng(7)
        sched = ConstantSchedule(random_hermitian(4, 1.0, rng))
        traj = propagate(sched, random_state(4, rng), TimeGrid(0, 2, 1001))
        assert constant_H_energy_drift(traj) <= 1e-9

    def test_requires_constant_family(self):
        traj = propagate(fourier_test_schedule(), PLUS, TimeGrid(0, 1, 11))
        with pytest.raises(UsageError):
            constant_H_energy_drift(traj)
