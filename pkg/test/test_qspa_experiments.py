import pytest, tempfile, json
import numpy as np


def test_qspa_experiments_importable():
    import qspa_experiments
    from qspa_experiments import apply_chc, run_nmr_pipeline, reconstruct, guess_probability


@pytest.mark.parametrize("mode", ["verified-default", "paper-literal"])
@pytest.mark.parametrize("name", ["basis", "general"])
def test_experiment(name, mode):
    from qspa_experiments import main
    self = main(name, mode=mode, max_rounds=2)

    assert len(self.populations) == 4
    assert self.cnot_residual < 1e-8
    assert self.tomo_error < 1e-9
    assert self.tomo_noisy_fidelity >= 0.99
    assert self.leakage["all+outcomes"] == pytest.approx([1.0, 1.0])
    if mode == "verified-default":
        assert self.qspa_verdict
        assert self.nmr_fidelity >= 1 - 1e-6

    with tempfile.NamedTemporaryFile("r") as fp:
        self.save_results(fp.name)
        saved = json.load(fp)
        print("saved results", saved)
    assert saved["name"] == name


def test_experiment_general_populations():
    from qspa_experiments import main
    self = main("general", max_rounds=1)
    assert self.populations == pytest.approx([0.6830 ** 2, 0.25, 0.1830 ** 2, 0.25], abs=1e-3)
    assert np.allclose(self.amplitudes, [0.6830, 0.5, -0.1830, 0.5], atol=5e-4)


def test_experiment_rejects_unknown_inputs():
    from qspa_experiments import main
    with pytest.raises(ValueError):
        main("bell")


def test_experiment_spin_system_kwargs():
    from qspa_experiments import main
    self = main("basis", max_rounds=1, nu1=350.0, nu2=-120.0)
    assert self.qspa_verdict
    assert self.nmr_fidelity >= 1 - 1e-6
