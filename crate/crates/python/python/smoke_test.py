"""Smoke test for the pygaussep extension module.

Build and install first, e.g.

    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/pygaussep-*.whl
"""

import math

import pygaussep as g


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    vac = g.CovarianceMatrix.vacuum(3)
    assert vac.n_modes == 3
    assert all(close(v, 1.0, 1e-12) for v in vac.ppt_values())

    m = g.measured()
    ppt = m.ppt_values()
    assert all(close(a, b, 0.015) for a, b in zip(ppt, (0.89, 1.10, 1.07))), ppt

    gl = g.invert_loss(m, g.DETECTION_EFFICIENCIES)
    ppt_l = gl.ppt_values()
    assert all(close(a, b, 0.01) for a, b in zip(ppt_l, (0.85, 1.07, 1.04))), ppt_l
    assert close(min(gl.symplectic_eigenvalues()), 1.11, 0.01)

    back = g.apply_loss(gl, g.DETECTION_EFFICIENCIES)
    assert max(abs(a - b) for ra, rb in zip(back.to_list(), m.to_list()) for a, b in zip(ra, rb)) < 1e-12

    rows, threshold = g.phase_noise_sweep(
        g.loss_compensated(), [math.radians(0.25 * k) for k in range(49)]
    )
    assert close(math.degrees(threshold), 7.0, 0.5), math.degrees(threshold)

    state = g.prepare_three_mode((-1.8, 5.1), (9.6, 10.2))
    a, b, c = state.ppt_values()
    assert a < 1.0 <= b and c >= 1.0
    phi, duan = g.optimize_distribution_phase(state)
    assert duan < 4.0
    assert close(g.duan_value(g.distribute(state, phi)), duan, 1e-12)

    onset6 = g.separability_onset(6.0, 0.4, [0.5 * k for k in range(121)])
    onset10 = g.separability_onset(10.0, 0.4, [0.5 * k for k in range(121)])
    assert onset6 is not None and close(onset6, onset10, 0.05)
    assert g.separability_onset(10.0, 0.25, [0.5 * k for k in range(121)]) is None

    gamma_hat, se = g.simulate_tomography(gl, 20000, 1)
    assert gamma_hat.n_modes == 3 and len(se) == 6

    mc = g.monte_carlo_ppt(gl, 2000, 8, 5)
    assert mc["n_runs"] == 8 and mc["muA"][0] < 1.0

    try:
        g.CovarianceMatrix([[1.0, 0.5], [0.0, 1.0]])
    except ValueError:
        pass
    else:
        raise AssertionError("asymmetric matrix accepted")

    print("pygaussep smoke test passed: PPT", [round(v, 4) for v in ppt], "duan*", round(duan, 4))


if __name__ == "__main__":
    main()
