"""Shared fixtures: one silver parameter set, states at the probe times,
and the expensive grid-integrator runs computed once per session."""

import time

import numpy as np
import pytest
from hypothesis import settings as hyp_settings

import sgcoarse as sg
from sgcoarse import cli
from sgcoarse.core import UnitSystem

hyp_settings.register_profile("suite", deadline=None, max_examples=50, derandomize=True)
hyp_settings.load_profile("suite")


@pytest.fixture(scope="session")
def silver():
    return sg.PhysicalParams.silver()


@pytest.fixture(scope="session")
def scales(silver):
    return sg.derive_scales(silver)


@pytest.fixture(scope="session")
def units(silver):
    return UnitSystem.for_params(silver)


@pytest.fixture(scope="session")
def state_t0(silver):
    return sg.evolve_in_field(silver, 0.0)


@pytest.fixture(scope="session")
def state_early(silver):
    # branches still overlap strongly; interference fringes fully visible
    return sg.evolve_in_field(silver, 1.0e-5)


@pytest.fixture(scope="session")
def state_late(silver):
    # branch separation a t^2 well beyond the packet width
    return sg.evolve_in_field(silver, 3.0e-5)


@pytest.fixture(scope="session")
def oracle_report(silver, scales):
    """Grid integrator vs closed forms at the three probe times, with timing."""
    times = [0.1 * scales.tau3, scales.tau3, 0.01 * scales.tau2]
    start = time.perf_counter()
    report = sg.verify_closed_forms(silver, times)
    return report, time.perf_counter() - start


@pytest.fixture(scope="session")
def convergence(silver, scales):
    return sg.convergence_order(silver, scales.tau3)


@pytest.fixture(scope="session")
def coarse_late(silver, state_late):
    """128x128 pixel-averaged field at t = 3e-5 s with the default pixel spec."""
    q, p = sg.default_phase_space_grid(silver, state_late.t, n_q=128, n_p=128)
    fine = sg.wigner_field(state_late, q, p)
    pix = sg.CoarsePixelSpec.default()
    return sg.coarse_grain(fine, pix), pix


@pytest.fixture(scope="session")
def silver_config(tmp_path_factory, silver):
    """Plain key = value config file holding the silver parameters."""
    text = "\n".join(
        f"{key} = {format(value, '.17g')}"
        for key, value in sg.params_to_entries(silver).items()
    )
    path = tmp_path_factory.mktemp("config") / "silver.cfg"
    path.write_text(text + "\n", encoding="utf-8")
    return str(path)


@pytest.fixture(scope="session")
def run_cli():
    """Invoke the command line entry point in process, capturing exit codes."""

    def run(argv):
        try:
            return cli.main(argv)
        except SystemExit as exc:  # argparse usage failures
            return int(exc.code or 0)

    return run


@pytest.fixture(scope="session")
def read_csv():
    """Split one of our CSV outputs into (header lines, column names, data)."""

    def read(path):
        header, names, rows = [], None, []
        with open(path, encoding="utf-8") as fh:
            for raw in fh.read().splitlines():
                if raw.startswith("#"):
                    header.append(raw)
                elif names is None:
                    names = raw.split(",")
                else:
                    rows.append([float(v) for v in raw.split(",")])
        return header, names, np.asarray(rows)

    return read
