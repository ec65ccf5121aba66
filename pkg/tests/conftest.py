"""Shared fixtures: each example pipeline runs once per session on its
shipped config; unit tests and the acceptance gate read the same reports."""

import time

import pytest

from plateau_lab import constructions as con
from plateau_lab import harness
from plateau_lab.cli import _load_config
from plateau_lab.solver import SolveOptions

# wall-clock seconds per pipeline, filled in as the fixtures run
PIPELINE_TIMES = {}

# lines emitted by the acceptance gate, echoed after the test summary
ACCEPTANCE_LINES = []


@pytest.fixture
def criterion_line():
    def emit(line):
        ACCEPTANCE_LINES.append(line)
        print(line)
    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        seen = []
        for line in ACCEPTANCE_LINES:
            if line not in seen:
                seen.append(line)
                terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ex1_report():
    cfg = _load_config("I", None)
    p = con.ExampleIParams(**cfg["params"])
    t0 = time.monotonic()
    rep = harness.verify_example_I(p, cfg["eps_sequence"], res=cfg["res"],
                                   opts=SolveOptions(**cfg["solver"]))
    PIPELINE_TIMES["I"] = time.monotonic() - t0
    return rep


@pytest.fixture(scope="session")
def ex2_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("example_II")
    cfg = _load_config("II", None)
    p = con.ExampleIIParams(**cfg["params"])
    t0 = time.monotonic()
    rep = harness.verify_example_II(p, out_dir=str(out), res=cfg["res"],
                                    fine_step=cfg["fine_step"],
                                    n_rim=int(cfg["n_rim"]))
    PIPELINE_TIMES["II"] = time.monotonic() - t0
    return rep, out


@pytest.fixture(scope="session")
def ex2_report(ex2_out):
    return ex2_out[0]


@pytest.fixture(scope="session")
def ex3a_report():
    cfg = _load_config("IIIA", None)
    t0 = time.monotonic()
    rep = harness.verify_example_IIIA(target_edge=cfg["target_edge"],
                                      opts=SolveOptions(**cfg["solver"]))
    PIPELINE_TIMES["IIIA"] = time.monotonic() - t0
    return rep


@pytest.fixture(scope="session")
def ex3b_report():
    cfg = _load_config("IIIB", None)
    p = con.ExampleIIIBParams(**cfg["params"])
    t0 = time.monotonic()
    rep = harness.verify_example_IIIB(p, res=cfg["res"])
    PIPELINE_TIMES["IIIB"] = time.monotonic() - t0
    return rep


@pytest.fixture(scope="session")
def checks_of():
    def named(report):
        return {c["name"]: c for c in report.checks}
    return named
