import json

import networkx as nx
import pytest

from tritrans import cli


def test_verify_qminus(tmp_path, capsys):
    assert cli.main(["verify", "q-minus", "--q", "2,3", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.count("CERTIFIED_TRIPLY_TRANSITIVE") == 2
    data = json.loads((tmp_path / "qminus5_q3.json").read_text())
    assert data["verdict"] == "CERTIFIED_TRIPLY_TRANSITIVE" and data["t"] == 2


def test_verify_vo_eps_list(tmp_path, capsys):
    assert cli.main(["verify", "vo", "--m", "2,3", "--eps", "-1,+1", "--out", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("vo_*.json"))) == 4


def test_verify_reference_and_controls(tmp_path, capsys):
    assert cli.main(["verify", "reference", "--family", "paley9", "--out", str(tmp_path)]) == 0
    # controls are reported but do not fail the run
    assert cli.main(["verify", "reference", "--family", "paley13,petersen",
                     "--out", str(tmp_path)]) == 0
    assert "REFUTED" in capsys.readouterr().out


def test_threads_do_not_change_reports(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["verify", "reference", "--family", "cycle5,grid(3),complete_multipartite(3,3)"]
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b), "--threads", "2"]) == 0
    for f in a.iterdir():
        assert f.read_bytes() == (b / f.name).read_bytes()


def test_non_certified_target_exits_1(tmp_path, monkeypatch):
    real = cli.verifier.certify_any

    def weakened(sel, seed, allow_large):
        rep = real(sel, seed, allow_large)
        rep.verdict = cli.verifier.NOT_CERTIFIED
        return rep
    monkeypatch.setattr(cli.verifier, "certify_any", weakened)
    assert cli.main(["verify", "q-minus", "--q", "2", "--out", str(tmp_path)]) == 1


def test_inconsistency_exits_2(tmp_path, monkeypatch, capsys):
    def broken(*args):
        raise cli.verifier.InconsistencyError("sandwich", "made up")
    monkeypatch.setattr(cli.verifier, "certify_any", broken)
    assert cli.main(["verify", "vo", "--m", "2", "--eps=1", "--out", str(tmp_path)]) == 2
    assert "sandwich" in capsys.readouterr().err


def test_orbits_writes_partitions(tmp_path, capsys):
    assert cli.main(["orbits", "q-minus", "--q", "3", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "Z1" in out
    rows = (tmp_path / "qminus5_q3_partitions.csv").read_text().splitlines()
    assert rows[0] == "stabilizer,subconstituent,class,representative,size"
    assert cli.main(["orbits", "vo", "--m", "3", "--eps=-1", "--out", str(tmp_path)]) == 0


def test_export(tmp_path, capsys):
    assert cli.main(["export", "vo", "--m", "2", "--eps", "-1", "--out", str(tmp_path)]) == 0
    g = nx.read_graph6(tmp_path / "vo_m2_eps-1.g6")
    assert g.number_of_nodes() == 16 and g.number_of_edges() == 40
    assert cli.main(["export", "q-minus", "--q", "2", "--out", str(tmp_path)]) == 0
    assert nx.read_graph6(tmp_path / "qminus5_q2.g6").number_of_nodes() == 27


def test_export_unwritable(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert cli.main(["export", "q-minus", "--q", "2", "--out", str(blocker / "sub")]) == 2
    assert str(blocker / "sub") in capsys.readouterr().err


def test_usage_errors(capsys):
    for argv in (["verify", "reference", "--family", "foo"],
                 ["verify", "vo", "--bogus"],
                 ["verify", "q-minus", "--q", "5"],
                 ["verify", "q-minus", "--q", "7"],
                 ["verify", "vo", "--m", "5"]):
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 2


def test_help_lists_every_flag(capsys):
    with pytest.raises(SystemExit):
        cli.main(["verify", "--help"])
    text = capsys.readouterr().out
    for flag in ("--q", "--m", "--eps", "--family", "--out", "--seed", "--threads",
                 "--allow-large", "--export", "--config"):
        assert flag in text


def test_config_file_flags_win(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nq = 2,3\nseed = 5\nout = nowhere\n")
    ns = cli.build_parser().parse_args(["verify", "q-minus", "--config", str(cfg),
                                        "--q", "2", "--out", str(tmp_path)])
    rc = cli.make_config(ns)
    assert rc.q == [2] and rc.seed == 5 and rc.out == tmp_path
    cfg.write_text("colour = red\n")
    with pytest.raises(ValueError):
        cli.read_config(cfg)


def test_split_list():
    assert cli.split_list("grid(3),complete_multipartite(3,3), paley9") == [
        "grid(3)", "complete_multipartite(3,3)", "paley9"]


def test_verify_export_flag(tmp_path):
    assert cli.main(["verify", "vo", "--m", "2", "--eps=1", "--out", str(tmp_path / "r"),
                     "--export", str(tmp_path / "g")]) == 0
    assert (tmp_path / "g" / "vo_m2_eps+1.dimacs").read_text().splitlines()[1] == "p edge 16 72"
