import pytest
import numpy as np, pandas as pd
from qspa_experiments.util.qlin import DensityMatrix, StateVector, ket, projector
from qspa_experiments.protocol import REFERENCE_INPUTS, apply_chc
from qspa_experiments.tomography import READOUT_PULSES, ReadoutExperiment, ObservableRecord, \
    readout_set, simulate_readout, simulate_readout_set, add_readout_noise, records_frame, \
    records_from_frame, figure_data, design_matrix, reconstruct, DEVIATION_LABELS
from qspa_experiments.nmr import product_operator_basis


def random_state(rng, rank=4):
    X = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = X @ X.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def test_readout_set():
    exps = readout_set()
    assert len(exps) == len(READOUT_PULSES) ** 2 == 9
    assert exps[0].id == "none-none"
    assert exps[1].id == "none-x90"
    assert len({e.id for e in exps}) == 9


def test_readout_experiment_validation():
    with pytest.raises(ValueError):
        ReadoutExperiment("none", "x180")


@pytest.mark.parametrize("bad", [[0.0] * 7, [0.0] * 7 + [np.nan]])
def test_observable_record_validation(bad):
    with pytest.raises(ValueError):
        ObservableRecord("none-none", bad)


def test_simulate_readout_examples():
    rec = simulate_readout(projector(ket("00")), ReadoutExperiment("y90", "none"))
    assert rec.values[0] == pytest.approx(1, abs=1e-12)
    assert np.allclose(rec.values[1:], 0, atol=1e-12)

    rec = simulate_readout(projector(ket("00")), ReadoutExperiment("none", "none"))
    assert np.allclose(rec.values, 0, atol=1e-12)

    mixed = DensityMatrix(np.eye(4) / 4)
    assert all(np.allclose(r.values, 0, atol=1e-12) for r in simulate_readout_set(mixed))


def test_simulate_readout_second_spin_uses_lower_doublet():
    # spin 1 in |1> selects the (1/2 - Iz1) doublet of spin 2
    rec = simulate_readout(projector(ket("10")), ReadoutExperiment("none", "y90"))
    assert rec.values[4:] == pytest.approx([0, 0, 1, 0], abs=1e-12)


def test_simulate_readout_rejects_unphysical():
    with pytest.raises(ValueError):
        simulate_readout(DensityMatrix(np.diag([1.1, 0, 0, -0.1])), ReadoutExperiment("none", "none"))


def test_design_matrix_rank():
    A = design_matrix()
    assert A.shape == (72, 15)
    assert np.linalg.matrix_rank(A) == 15


@pytest.mark.parametrize("seed", range(5))
def test_reconstruct_random_states(seed):
    rho = random_state(np.random.default_rng(seed), rank=1 + seed % 4)
    res = reconstruct(simulate_readout_set(rho))
    assert np.abs(res.rho.data - rho.data).max() <= 1e-9
    assert res.residual <= 1e-9
    assert np.isfinite(res.condition_number)


def test_reconstruct_thousand_random_states():
    rng = np.random.default_rng(8)
    worst = 0.0
    for i in range(1000):
        rho = random_state(rng, rank=1 + i % 4)
        res = reconstruct(simulate_readout_set(rho))
        worst = max(worst, np.abs(res.rho.data - rho.data).max())
    assert worst <= 1e-9


def combine(alpha, a, b):
    return [ObservableRecord(r.experiment_id,
                             alpha * np.array(r.values) + (1 - alpha) * np.array(s.values))
            for r, s in zip(a, b)]


@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.85])
def test_reconstruct_is_linear(alpha):
    rng = np.random.default_rng(12)
    a = add_readout_noise(simulate_readout_set(random_state(rng)), 0.02, rng)
    b = add_readout_noise(simulate_readout_set(random_state(rng)), 0.02, rng)
    mixed = reconstruct(combine(alpha, a, b)).rho.data
    expect = alpha * reconstruct(a).rho.data + (1 - alpha) * reconstruct(b).rho.data
    assert np.abs(mixed - expect).max() <= 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_hermitization_barely_moves_noise_free_result(seed):
    records = simulate_readout_set(random_state(np.random.default_rng(seed)))
    by_id = {r.experiment_id: r.values for r in records}
    y = np.concatenate([by_id[e.id] for e in readout_set()])
    coef = np.linalg.lstsq(design_matrix(), y, rcond=None)[0]
    basis = product_operator_basis()
    raw = np.eye(4) / 4 + sum(c * basis[b] for c, b in zip(coef, DEVIATION_LABELS))
    assert np.abs(reconstruct(records).rho.data - raw).max() <= 1e-10


def test_reconstruct_general_output():
    truth = projector(apply_chc(*REFERENCE_INPUTS["general"]))
    res = reconstruct(simulate_readout_set(truth))
    assert np.abs(res.rho.data - truth.data).max() <= 1e-6
    assert res.fidelity(truth) == pytest.approx(1, abs=1e-9)


def test_reconstruct_is_order_independent():
    rho = projector(StateVector(np.array([1, 1j, 0, 1]) / np.sqrt(3)))
    records = simulate_readout_set(rho)
    a = reconstruct(records)
    b = reconstruct(records[::-1])
    assert np.allclose(a.rho.data, b.rho.data, atol=1e-12)


def test_readout_is_linear():
    rng = np.random.default_rng(11)
    rho, sigma = random_state(rng), random_state(rng)
    mix = DensityMatrix(0.3 * rho.data + 0.7 * sigma.data)
    for r, s, m in zip(*map(simulate_readout_set, [rho, sigma, mix])):
        assert np.allclose(m.values, 0.3 * np.array(r.values) + 0.7 * np.array(s.values), atol=1e-12)


def test_reconstruct_missing_records():
    records = simulate_readout_set(projector(ket("00")))
    with pytest.raises(ValueError, match="missing"):
        reconstruct(records[:-1])
    with pytest.raises(ValueError):
        reconstruct(records + records[:1])


def test_noisy_reconstruction():
    truth = projector(apply_chc((1, 0), (0, 1)))
    records = add_readout_noise(simulate_readout_set(truth), 0.01, np.random.default_rng(0))
    res = reconstruct(records)
    assert res.residual > 0
    assert res.fidelity(truth) >= 0.99
    assert np.trace(res.rho.data).real == pytest.approx(1)


def test_noise_is_seeded():
    records = simulate_readout_set(projector(ket("01")))
    a = add_readout_noise(records, 0.05, np.random.default_rng(4))
    b = add_readout_noise(records, 0.05, np.random.default_rng(4))
    assert a == b
    assert add_readout_noise(records, 0, np.random.default_rng(4)) == records
    with pytest.raises(ValueError):
        add_readout_noise(records, -1, np.random.default_rng(4))


def test_records_frame():
    records = simulate_readout_set(projector(apply_chc("+x", "-z")))
    df = records_frame(records)
    assert list(df.columns) == ["experiment_id"] + [f"obs_{i}" for i in range(1, 9)]
    assert len(df) == 9
    assert records_from_frame(df) == records
    with pytest.raises(ValueError, match="missing"):
        records_from_frame(df.drop(columns="obs_3"))


def test_figure_data():
    df = figure_data(projector(apply_chc((1, 0), (0, 1))))
    assert isinstance(df, pd.DataFrame)
    assert list(df.columns) == ["row", "col", "real", "imag"]
    assert len(df) == 16
    entry = df[(df.row == "01") & (df.col == "10")].iloc[0]
    assert entry.real == pytest.approx(0.5)
    assert entry.imag == pytest.approx(0)
    assert df.real.sum() == pytest.approx(2)
    with pytest.raises(ValueError):
        figure_data(np.eye(2))
