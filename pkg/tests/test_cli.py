"""CLI grammar, exit codes, CSV/JSON contracts, and schema validation."""
import csv
import json
from fractions import Fraction

import pytest

try:
    import jsonschema
except ImportError:  # pragma: no cover
    jsonschema = None

from modemb.cli import (
    EX_USAGE,
    SpecParseError,
    main,
    parse_space,
    render_space,
)
from modemb.exponents import INF, Exponent
from modemb.oracle import Family, SpaceSpec

F = Fraction

requires_jsonschema = pytest.mark.skipif(jsonschema is None,
                                         reason="jsonschema not installed")


def _schema(name):
    from importlib.resources import files
    return json.loads(files("modemb.schemas").joinpath(name).read_text())


def test_parse_space_examples():
    spec = parse_space("B[p=1,q=2,s=1/2]")
    assert spec.family is Family.BESOV
    assert spec.p == Exponent.of(1) and spec.q == Exponent.of(2)
    assert spec.s == F(1, 2)
    spec = parse_space("M[p=2,q=1]")
    assert spec.s == 0
    spec = parse_space("W[r=inf,s=-3/4]")
    assert spec.r == INF and spec.s == F(-3, 4)
    spec = parse_space("FL[r=2]")
    assert spec.family is Family.FOURIER_L and spec.s is None


@pytest.mark.parametrize("bad", [
    "B[p=1,q=2", "X[p=1,q=2]", "B[p=1]", "B[p=0,q=2]", "B[p=1,q=2,r=3]",
    "B[p=1,p=2,q=1]", "FL[r=2,s=1]", "B[p=1.5,q=2]", "M[p=inf,q=inf,s=inf]",
])
def test_parse_space_rejects(bad):
    with pytest.raises(SpecParseError):
        parse_space(bad)


def test_parse_error_carries_position():
    with pytest.raises(SpecParseError) as err:
        parse_space("B[p=oops,q=2]")
    assert err.value.pos == 2


def test_render_parse_round_trip():
    cases = [
        SpaceSpec.besov(1, 2, F(1, 2)),
        SpaceSpec.modulation(F(3, 2), INF, -1),
        SpaceSpec.triebel(2, 2, 0),
        SpaceSpec.sobolev(INF, F(-3, 4)),
        SpaceSpec.fourier_l(F(7, 5)),
    ]
    for spec in cases:
        assert parse_space(render_space(spec)) == spec
    # canonical form: parse then render is idempotent
    text = "B[p=1,q=2]"
    canonical = render_space(parse_space(text))
    assert canonical == "B[p=1,q=2,s=0]"
    assert render_space(parse_space(canonical)) == canonical


def test_decide_exit_codes(capsys):
    assert main(["decide", "--from", "B[p=1,q=1,s=1/2]", "--to", "M[p=2,q=2]"]) == 0
    assert main(["decide", "--from", "B[p=1,q=1,s=0]", "--to", "M[p=2,q=2]"]) == 1
    assert main(["decide", "--from", "F[p=2,q=1,s=0]", "--to", "M[p=2,q=4]"]) == 2
    assert main(["decide", "--from", "W[r=1/2,s=0]", "--to", "M[p=2,q=2]"]) == 2
    assert main(["decide", "--from", "B[p=nope,q=1]", "--to", "M[p=2,q=2]"]) == EX_USAGE
    capsys.readouterr()


@requires_jsonschema
def test_decide_json_schema(capsys):
    main(["decide", "--from", "B[p=1,q=1,s=1/2]", "--to", "M[p=2,q=2]", "--json"])
    payload = json.loads(capsys.readouterr().out)
    jsonschema.validate(payload, _schema("verdict-v1.json"))
    assert payload["holds"] is True and payload["clause"] == "B->M (1)"


def test_table_sobolev_regions(tmp_path):
    out = tmp_path / "fig1.csv"
    assert main(["table", "--pair", "W-M", "--s", "0",
                 "--resolution", "33", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 33 * 33
    for row in rows:
        inv_r, inv_q = F(row["inv_p"]), F(row["inv_q"])
        if inv_q > inv_r:  # r > q: condition (1) territory
            assert row["clause"] == "W->M (1)", row
        if inv_r == 1 and inv_q == 0:
            assert row["clause"] == "W->M (3)"
    # s = 0 sweep: holdings occupy the 1/q <= 1/r triangle minus the r = 1 edge
    holds = {(row["inv_p"], row["inv_q"]) for row in rows if row["holds"] == "1"}
    assert ("1/2", "1/4") in holds and ("1/4", "1/2") not in holds


def test_table_besov_pieces(tmp_path):
    out = tmp_path / "fig2.csv"
    assert main(["table", "--pair", "B-M", "--s", "0",
                 "--resolution", "17", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    pieces = {row["piece"] for row in rows}
    assert pieces == {"0", "1/q - 1/p", "1/q + 1/p - 1"}
    for row in rows:
        u, v = F(row["inv_p"]), F(row["inv_q"])
        expected = max(F(0), v - u, v + u - 1)
        if expected == 0:
            assert row["piece"] == "0"


def test_table_resolution_one(capsys):
    assert main(["table", "--pair", "B-M", "--s", "0", "--resolution", "1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2  # header + single row


def test_table_resolution_guard(capsys):
    assert main(["table", "--pair", "B-M", "--s", "0", "--resolution", "65"]) == 2
    capsys.readouterr()


def test_norm_matches_library_call(capsys):
    code = main(["norm", "--family", "annulus", "--level", "5",
                 "--space", "M[p=2,q=1,s=0]"])
    assert code == 0
    printed = float(capsys.readouterr().out.strip())

    from modemb.families import family_annulus, grid_for
    from modemb.norms import modulation_norm
    from modemb.partitions import build_uniform
    spec = grid_for("annulus", level=5)
    expected = modulation_norm(family_annulus(spec, 5), 2, 1, 0, build_uniform(spec))
    assert printed == expected  # same code path, bit-identical


@requires_jsonschema
def test_sharpness_cli_json(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    csv_path = tmp_path / "report.csv"
    code = main(["sharpness", "--from", "B[p=2,q=2,s=-1/4]", "--to", "M[p=2,q=2]",
                 "--family", "single_box", "--lmin", "4", "--lmax", "7",
                 "--json", str(report_path), "--csv", str(csv_path)])
    capsys.readouterr()
    assert code == 0
    payload = json.loads(report_path.read_text())
    jsonschema.validate(payload, _schema("experiment-v1.json"))
    assert payload["predicted_slope"] == "1/4"
    rows = list(csv.DictReader(csv_path.open()))
    assert [row["level"] for row in rows] == ["4", "5", "6", "7"]


def test_boundedness_cli_kernel(capsys):
    code = main(["boundedness", "--from", "W[r=1,s=0]", "--to", "M[p=1,q=inf]",
                 "--family", "dilated_kernel", "--t-list", "1/4,1/16,1/64"])
    capsys.readouterr()
    assert code == 0


@requires_jsonschema
def test_selftest_cli(tmp_path, capsys):
    report_path = tmp_path / "selftest.json"
    code = main(["selftest", "--n", "4096", "--json", str(report_path)])
    capsys.readouterr()
    assert code == 0
    payload = json.loads(report_path.read_text())
    jsonschema.validate(payload, _schema("selftest-v1.json"))
    assert payload["passed"] is True


def test_config_defaults_and_override(tmp_path, capsys):
    config = tmp_path / "modemb.cfg"
    config.write_text("# defaults\nd = 1\nresolution = 2\n")
    assert main(["--config", str(config), "table", "--pair", "B-M", "--s", "0"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 1 + 4  # resolution 2 from config
    assert main(["--config", str(config), "table", "--pair", "B-M", "--s", "0",
                 "--resolution", "1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 1 + 1  # flag overrides config


def test_config_parse_error(tmp_path, capsys):
    config = tmp_path / "bad.cfg"
    config.write_text("not a key value line\n")
    assert main(["--config", str(config), "decide", "--from", "B[p=1,q=1,s=1]",
                 "--to", "M[p=1,q=1]"]) == 2
    capsys.readouterr()
