import csv
import io
import json
from pathlib import Path


from torusdual import cli
from torusdual.abelian import FgAbGroup

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(path)


def test_cohomology_table(capsys):
    code, out, _ = run(capsys, "cohomology", "--config", str(CONFIGS / "antipodal.json"), "--format", "json", "--quiet")
    assert code == 0
    data = json.loads(out)["data"]["cohomology"]
    assert data["Z"] == ["Z", "Z", "0", "Z/2"]
    assert data["Lambda"] == ["0", "Z/4", "Z", "Z"]


def test_dualize_swaps_pair(capsys):
    code, out, _ = run(capsys, "dualize", "--config", str(CONFIGS / "torus_unipotent.json"), "--format", "json", "--quiet")
    assert code == 0
    data = json.loads(out)["data"]
    assert data["dual_chern"] == [6] and data["dual_k"] == [4]
    assert data["relations"]["all_pass"]


def test_ktheory_orbit(capsys):
    code, out, _ = run(
        capsys, "ktheory", "--config", str(CONFIGS / "torus_unipotent.json"), "--orbit", "4,6", "--format", "json", "--quiet"
    )
    assert code == 0
    data = json.loads(out)["data"]
    assert data["normal_form"] == [2, 0]
    assert data["groups_constant"]


def test_invalid_matrix_entry(tmp_path, capsys):
    path = write(tmp_path, "c.json", {"base": {"torus": 2}, "monodromy": [[[1, "x"], [0, 1]], [[1, 0], [0, 1]]]})
    code, _, err = run(capsys, "cohomology", "--config", path)
    assert code == 1
    assert "monodromy[0][0][1]" in err


def test_invalid_json_reports_position(tmp_path, capsys):
    path = write(tmp_path, "c.json", '{"base": {"torus": 2},\n "monodromy": [}')
    code, _, err = run(capsys, "cohomology", "--config", path)
    assert code == 1
    assert "c.json:2:" in err


def test_non_unimodular_is_config_error(capsys):
    code, _, err = run(capsys, "bundle", "--config", str(CONFIGS / "bad_monodromy.json"))
    assert code == 1 and "determinant" in err


def test_strict_undetermined_exit(tmp_path, capsys):
    config = {"base": {"antipodal_sphere": 2}, "monodromy": [[[-1, -1], [0, -1]]], "chern": [0]}
    path = write(tmp_path, "c.json", config)
    assert run(capsys, "bundle", "--config", path, "--quiet")[0] == 0
    assert run(capsys, "bundle", "--config", path, "--quiet", "--strict")[0] == 2


def test_internal_violation_exit(monkeypatch, capsys):
    def broken(wb, args):
        raise AssertionError("d∘d ≠ 0")

    monkeypatch.setitem(cli.RUNNERS, "tables", broken)
    assert run(capsys, "tables", "--quiet")[0] == 3


def test_json_round_trip(tmp_path, capsys):
    first = str(tmp_path / "first.json")
    second = str(tmp_path / "second.json")
    assert cli.main(["bundle", "--config", str(CONFIGS / "torus_unipotent.json"), "--format", "json", "--out", first]) == 0
    assert cli.main(["bundle", "--config", first, "--format", "json", "--out", second]) == 0
    assert Path(first).read_text() == Path(second).read_text()


def test_text_and_json_agree(capsys):
    args = ["bundle", "--config", str(CONFIGS / "antipodal.json"), "--quiet"]
    _, text, _ = run(capsys, *args)
    _, js, _ = run(capsys, *args, "--format", "json")
    lines = text.splitlines()
    for table in json.loads(js)["tables"]:
        for row in table["rows"]:
            assert any(all(cell in line for cell in row) for line in lines), row


def test_csv_cells_are_canonical(capsys):
    _, out, _ = run(capsys, "cohomology", "--config", str(CONFIGS / "torus_unipotent.json"), "--format", "csv", "--quiet")
    rows = [r for r in csv.reader(io.StringIO(out)) if r and not r[0].startswith("#") and r[0] != "i"]
    for row in rows:
        for cell in row[1:]:
            assert str(FgAbGroup.parse(cell)) == cell


def test_selftest_seed_is_reproducible(tmp_path, capsys):
    path = write(tmp_path, "s.json", {"selftest": {"n_max": 2, "m_max": 1, "models": 5, "pairs": 5, "pair_max": 1}})
    outs = [run(capsys, "hori-selftest", "--config", path, "--seed", "7", "--format", "json", "--quiet")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["data"]["passed"]


def test_ledger_printed_by_default(capsys):
    code, out, _ = run(capsys, "tables")
    assert code == 0
    assert "Deviation ledger" in out and "explained" in out
    _, quiet, _ = run(capsys, "tables", "--quiet")
    assert "Deviation ledger" not in quiet


def test_out_file(tmp_path):
    target = tmp_path / "out.csv"
    assert cli.main(["tables", "--format", "csv", "--out", str(target), "--quiet"]) == 0
    assert target.read_text().startswith("# ")


def test_missing_section(capsys):
    code, _, err = run(capsys, "dualize")
    assert code == 1 and "bundle" in err
