"""Command-line driver: config parsing, catalog, output files, exit codes."""

import csv
import io

import pytest

from coxnet import cli

SMALL = """
[experiment]
kind = success
name = small
[model]
models = PSP, PLP
orders = 2
[params]
lam = 0.6
p = 0.5
mu = 0.1
[law]
specs = deterministic:h0=10
[grid]
theta = 0.1, 1, 10
[mc]
n = 400
seed = 9
chunk_size = 200
"""


def _write(tmp_path, text, name="c.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_list_is_nonempty(capsys):
    assert cli.main(["--list"]) == 0
    out = capsys.readouterr().out
    assert "fig6b" in out and len(out.splitlines()) >= len(cli.CATALOG)


def test_fig6b_is_psp_with_fixed_half_length():
    cfg = cli.catalog_config("fig6b")
    assert cfg.models == ("PSP",) and cfg.mus == (0.1,)
    law = cfg.laws[0].build(0.1)
    assert law.kind == "deterministic" and law.mean == 10.0


@pytest.mark.parametrize("name", sorted(cli.CATALOG))
def test_catalog_round_trips(name):
    cfg = cli.catalog_config(name)
    again = cli.parse_config(cli.config_text(cfg))
    cli.validate(again)
    assert cli.config_text(again) == cli.config_text(cfg)


@pytest.mark.parametrize("text", ["x", "[params]\nlam = 1\n[bogus]\nk = 1\n",
                                  SMALL.replace("lam = 0.6", "lam = 0.6\nlamda = 1"),
                                  SMALL.replace("theta = 0.1, 1, 10", "theta = logspace:1:0"),
                                  SMALL.replace("kind = success", "kind = nonsense")])
def test_malformed_config_exits_nonzero_without_files(tmp_path, text):
    out = tmp_path / "out"
    code = cli.main(["--config", str(_write(tmp_path, text)), "--out", str(out)])
    assert code == cli.EXIT_CONFIG
    assert not out.exists()


def test_invalid_parameter_exit_code(tmp_path):
    out = tmp_path / "out"
    code = cli.main(["--config", str(_write(tmp_path, SMALL.replace("p = 0.5", "p = 1.5"))), "--out", str(out)])
    assert code in (cli.EXIT_PARAM, cli.EXIT_CONFIG) and code != 0
    assert not out.exists()


def test_exactly_one_source(tmp_path):
    assert cli.main([]) == cli.EXIT_CONFIG
    assert cli.main(["--experiment", "nope"]) == cli.EXIT_CONFIG


def test_same_seed_gives_identical_files(tmp_path):
    cfgp = _write(tmp_path, SMALL)
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["--config", str(cfgp), "--out", str(a)]) == 0
    assert cli.main(["--config", str(cfgp), "--out", str(b)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes(), n
    c = tmp_path / "c"
    assert cli.main(["--config", str(cfgp), "--out", str(c), "--seed", "10"]) == 0
    assert (c / "results.csv").read_bytes() != (a / "results.csv").read_bytes()


def test_success_output_columns(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["--config", str(_write(tmp_path, SMALL)), "--out", str(out)]) == 0
    rows = list(csv.DictReader(io.StringIO((out / "results.csv").read_text())))
    assert {"theta", "value", "err_or_ci", "kind"} <= set(rows[0])
    kinds = {r["kind"] for r in rows}
    assert kinds == {"analytic", "monte-carlo"}
    mc = [r for r in rows if r["kind"] == "monte-carlo"]
    assert all(float(r["err_or_ci"]) > 0 for r in mc)
    assert (out / "manifest.json").exists() and (out / "summary.txt").read_text().strip()


def test_print_config(capsys):
    assert cli.main(["--experiment", "fig9", "--print-config"]) == 0
    assert "[experiment]" in capsys.readouterr().out


@pytest.mark.parametrize("text,expected", [("logspace:-2:2:5", 5), ("linspace:1:2:3", 3), ("0.1, 1, 10", 3)])
def test_parse_grid(text, expected):
    assert len(cli.parse_grid(text)) == expected


def test_parse_law():
    spec = cli.parse_law("rayleigh:b_per_mu=1.04")
    assert spec.build(2.0).b == pytest.approx(2.08)
    with pytest.raises(cli.ConfigError):
        cli.parse_law("rayleigh:b")
