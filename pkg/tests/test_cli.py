import csv
import io
import json

import jsonschema
import pytest
from click.testing import CliRunner
from pytest import approx

from erwhyp.cli import IDENTITY_COLUMNS, LIMIT_COLUMNS, MOMENT_COLUMNS, SIMULATE_COLUMNS, cli, load_schema


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args, env=None):
        return runner.invoke(cli, list(args), env=env)

    return invoke


def rows(output):
    return list(csv.DictReader(io.StringIO(output)))


def header(output):
    return tuple(output.splitlines()[0].split(","))


def test_identity_t1(run):
    res = run("identity", "--kind", "t1", "--a", "1", "--tol", "1e-8")
    assert res.exit_code == 0
    assert header(res.output) == IDENTITY_COLUMNS
    (row,) = rows(res.output)
    assert row["pass"] == "true" and row["kind"] == "t1"
    assert float(row["lhs"]) == 1.0


def test_identity_accepts_fraction(run):
    res = run("identity", "--kind", "stops", "--a", "3/4", "--b", "1/2")
    assert res.exit_code == 0
    assert float(rows(res.output)[0]["a"]) == 0.75


def test_identity_failure_exit_code(run, monkeypatch):
    import dataclasses

    import erwhyp.cli as cli_mod

    real = cli_mod.evaluate
    monkeypatch.setattr(cli_mod, "evaluate", lambda case: dataclasses.replace(real(case), passed=False))
    res = run("sweep", "--kind", "t1", "--a-grid", "0.8,1.2")
    assert res.exit_code == 1
    assert [r["pass"] for r in rows(res.output)] == ["false", "false"]


def test_identity_domain_error(run):
    res = run("identity", "--kind", "t1", "--a", "0.4")
    assert res.exit_code == 1
    assert "a > 1/2" in res.output


def test_identity_parse_error(run):
    assert run("identity", "--kind", "nope", "--a", "1").exit_code == 2
    assert run("identity", "--kind", "t1").exit_code == 2
    assert run("identity", "--kind", "t1", "--a", "x1").exit_code != 0


def test_general_near_boundary(run):
    res = run("identity", "--kind", "general", "--a", "0.51", "--d", "2", "--tol", "1e-7")
    row = rows(res.output)[0]
    assert int(row["terms"]) > 50
    assert res.exit_code == (0 if row["pass"] == "true" else 1)


def test_general_default_tolerance(run):
    res = run("identity", "--kind", "general", "--a", "0.8", "--d", "5", "--format", "json")
    assert res.exit_code == 0
    assert json.loads(res.output)[0]["pass"] is True


def test_moments_exact(run):
    res = run("moments", "--p", "4/5", "--q", "1", "--d", "2", "--n-max", "3", "--mode", "exact")
    assert res.exit_code == 0
    assert header(res.output) == MOMENT_COLUMNS
    second = {int(r["n"]): r["value"] for r in rows(res.output) if r["k"] == "2"}
    assert second == {1: "1", 2: "16/5", 3: "153/25"}


def test_moments_auto_routes_decimals_to_float(run):
    res = run("moments", "--p", "0.8", "--q", "1", "--d", "2", "--n-max", "2", "--format", "json")
    data = json.loads(res.output)
    jsonschema.validate(data, load_schema("moments"))
    assert data[-1]["value"] == approx(3.2)


def test_moments_exact_with_decimals_rejected(run):
    res = run("moments", "--p", "0.8", "--q", "1", "--d", "2", "--n-max", "2", "--mode", "exact")
    assert res.exit_code == 1


def test_moments_closed_source(run):
    res = run("moments", "--p", "9/10", "--q", "3/4", "--d", "4", "--n-max", "5", "--source", "closed")
    rec = run("moments", "--p", "9/10", "--q", "3/4", "--d", "4", "--n-max", "5")
    closed = {(r["n"], r["k"]): r["value"] for r in rows(res.output)}
    recursion = {(r["n"], r["k"]): r["value"] for r in rows(rec.output)}
    assert all(recursion[key] == v for key, v in closed.items())


def test_moments_stops(run):
    res = run("moments", "--p", "1/2", "--q", "1/4", "--r", "1/4", "--s", "3/4", "--d", "2", "--n-max", "2")
    assert rows(res.output)[-1]["value"] == "9/4"


def test_moments_domain_error(run):
    res = run("moments", "--p", "0.9", "--q", "1", "--r", "0.1", "--d", "2", "--n-max", "2")
    assert res.exit_code == 1 and "stops" in res.output


def test_limit_all_methods(run):
    res = run("limit", "--p", "0.9", "--q", "0.8", "--d", "3", "--method", "all", "--n-max", "20000",
              "--format", "json")
    assert res.exit_code == 0
    data = json.loads(res.output)
    jsonschema.validate(data, load_schema("limit"))
    values = {r["method"]: r["value"] for r in data}
    assert values["identity"] == approx(values["closed"], rel=1e-9)
    assert values["numeric"] == approx(values["closed"], rel=1e-5)


def test_limit_csv_and_domain(run):
    res = run("limit", "--p", "0.9", "--q", "1", "--d", "2")
    assert header(res.output) == LIMIT_COLUMNS
    assert run("limit", "--p", "0.7", "--q", "1", "--d", "2").exit_code == 1


def test_simulate_json_schema_and_seed(run):
    args = ("simulate", "--p", "0.85", "--q", "0.9", "--n-steps", "100", "--n-walks", "500",
            "--seed", "42", "--format", "json")
    first, second = run(*args), run(*args)
    assert first.exit_code == 0 and first.output == second.output
    data = json.loads(first.output)
    jsonschema.validate(data, load_schema("simulate"))
    assert data["seed"] == 42 and data["config"]["n_steps"] == 100
    third = run(*args[:-4], "--seed", "43", "--format", "json")
    assert third.output != first.output


def test_simulate_workers_do_not_change_output(run):
    args = ("simulate", "--p", "0.8", "--q", "0.6", "--n-steps", "50", "--n-walks", "9000", "--seed", "1")
    assert run(*args, env={"ERW_WORKERS": "1"}).output == run(*args, env={"ERW_WORKERS": "2"}).output


def test_simulate_csv(run):
    res = run("simulate", "--p", "1", "--q", "1", "--n-steps", "10", "--n-walks", "5", "--orders", "1,2")
    assert header(res.output) == SIMULATE_COLUMNS
    assert [float(r["mean_L"]) for r in rows(res.output)] == [1.0, 1.0]


def test_simulate_bad_config(run):
    res = run("simulate", "--p", "0.8", "--q", "0.6", "--n-steps", "0", "--n-walks", "5")
    assert res.exit_code == 1


@pytest.mark.parametrize("workers", ["1", "2"])
def test_sweep_order_and_schema(run, workers):
    res = run("sweep", "--kind", "general", "--a-grid", "0.6,1.5", "--d-grid", "2,5", "--format", "json",
              env={"ERW_WORKERS": workers})
    assert res.exit_code == 0
    data = json.loads(res.output)
    jsonschema.validate(data, load_schema("sweep"))
    assert [(r["a"], r["d"]) for r in data] == [(0.6, 2), (0.6, 5), (1.5, 2), (1.5, 5)]


def test_sweep_stops_skips_outside_domain(run):
    res = run("sweep", "--kind", "stops", "--a-grid", "0.5", "--b-grid", "0.3,1.2")
    assert [r["b"] for r in rows(res.output)] == ["0.3"]


def test_sweep_empty_grid_is_error(run):
    assert run("sweep", "--kind", "stops", "--a-grid", "0.5", "--b-grid", "1.2").exit_code == 1


def test_schema_rejects_bad_row():
    bad = [{"kind": "t1", "a": 1.0, "b": None, "d": None, "lhs": 1.0, "rhs": 1.0,
            "residual": -1.0, "tail_bound": -1.0, "terms": 3, "pass": True}]
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad, load_schema("identity"))
