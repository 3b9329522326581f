import json
import subprocess
import sys

import pytest

from qnetcode import cli, instances, netfile
from qnetcode.coding import is_linear, verify_solution
from qnetcode.errors import NetworkError, ParseError


def bfly_doc():
    return json.loads(netfile.fixture_path("butterfly.json").read_text())


def write(tmp_path, doc, name="net.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(p)


@pytest.mark.parametrize("name", netfile.FIXTURES)
def test_fixture_roundtrip(name):
    net, s = netfile.parse_network_file(netfile.fixture_path(name))
    assert verify_solution(s, net)[0]
    again = netfile.loads(netfile.dumps(net, s))
    assert again == (net, s)


def test_fixtures_match_builders():
    assert netfile.parse_network_file("butterfly.json") == instances.butterfly(2)
    net, s = netfile.parse_network_file("butterfly_nonlinear.json")
    assert not is_linear(s, net)
    assert netfile.load_aliases("butterfly.json")["a1"] == "edge:s1>n3"


def test_short_table(tmp_path):
    doc = bfly_doc()
    doc["coding"]["n1"] = doc["coding"]["n1"][:3]
    with pytest.raises(ParseError, match="expected 4 rows"):
        netfile.parse_network_file(write(tmp_path, doc))


def test_bad_json_position(tmp_path):
    with pytest.raises(ParseError, match=r":1:\d+"):
        netfile.parse_network_file(write(tmp_path, '{"alphabet_size": 2,,}'))


def test_missing_key_and_network_error(tmp_path):
    doc = bfly_doc()
    del doc["pairs"]
    with pytest.raises(ParseError, match="pairs"):
        netfile.parse_network_file(write(tmp_path, doc))
    doc = bfly_doc()
    doc["edges"].append(["n2", "n1"])
    with pytest.raises(NetworkError, match="cycle"):
        netfile.parse_network_file(write(tmp_path, doc))


def test_target_in_coding_rejected(tmp_path):
    doc = bfly_doc()
    doc["coding"]["t1"] = [[0], [1]]
    with pytest.raises(ParseError):
        netfile.parse_network_file(write(tmp_path, doc))


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_cli(capsys, tmp_path):
    assert run_cli(capsys, "verify", "butterfly.json")[:2] == (0, "SOLUTION (linear)\n")
    assert run_cli(capsys, "verify", "butterfly_nonlinear.json")[:2] == (0, "SOLUTION (nonlinear)\n")
    doc = bfly_doc()
    doc["coding"]["n1"] = [[0], [0], [0], [1]]
    code, out, _ = run_cli(capsys, "verify", write(tmp_path, doc))
    assert code == 1
    assert out.startswith("NOT A SOLUTION: x=(0,1)") and "target 2 received 0" in out
    assert run_cli(capsys, "verify", write(tmp_path, "{", "bad.json"))[0] == 2
    assert run_cli(capsys, "verify", str(tmp_path / "missing.json"))[0] == 2


def test_run_cli(capsys):
    code, out, _ = run_cli(capsys, "run", "butterfly.json", "--seed", "7", "--input", "random")
    assert code == 0
    assert "fidelity: 1.000000000" in out
    assert "classical: 14 bits ≤ 18 (bound OK)" in out
    again = run_cli(capsys, "run", "butterfly.json", "--seed", "7")[1]
    assert again == out


def test_run_identity_cli(capsys):
    code, out, _ = run_cli(capsys, "run", "identity.json")
    assert code == 0
    assert "quantum: 1 registers sent" in out and "classical: 1 bits" in out


def test_run_forced_dump(capsys):
    code, out, _ = run_cli(capsys, "run", "butterfly.json", "--force",
                           "a1=1,a2=1,b1=0,b2=0,c=1,d1=0,d2=0,e1=1,e2=0", "--dump-states")
    assert code == 0
    assert out.count("== state") == 3
    assert "s1->n3\tReverse\tPart2\t1" in out
    assert "n1->n2\tReverse\tPart2\t1" in out
    assert "s1->n1\tForward\tPart3\t1" in out


def test_run_amplitude_file(capsys, tmp_path):
    p = tmp_path / "amps.txt"
    p.write_text("# alpha_00 .. alpha_11\n0.5 0\n0 0.5\n-0.5 0\n0 -0.5\n")
    code, out, _ = run_cli(capsys, "run", "butterfly.json", "--input", str(p))
    assert code == 0 and "fidelity: 1.000000000" in out
    p.write_text("1 0\n")
    assert run_cli(capsys, "run", "butterfly.json", "--input", str(p))[0] == 2


def test_run_bad_force(capsys):
    assert run_cli(capsys, "run", "butterfly.json", "--force", "zz=1")[0] == 2
    assert run_cli(capsys, "run", "butterfly.json", "--force", "edge:s1>t2=1")[0] == 2
    assert run_cli(capsys, "run", "butterfly.json", "--force", "src:9=1")[0] == 2
    assert run_cli(capsys, "run", "butterfly.json", "--force", "a1=5")[0] == 3


def test_generic_force_syntax(capsys):
    code, out, _ = run_cli(capsys, "run", "butterfly.json", "--force", "edge:#0=1,src:2=1")
    assert code == 0
    assert "s1->n3\tReverse\tPart2\t1" in out
    assert "s2->n1\tForward\tPart3\t1" in out


def test_repeat_is_seed_ordered(capsys):
    code, out, _ = run_cli(capsys, "run", "butterfly.json", "--seed", "3", "--repeat", "4")
    assert code == 0
    blocks = out.split("# seed ")[1:]
    assert [b.split("\n")[0] for b in blocks] == ["3", "4", "5", "6"]
    single = run_cli(capsys, "run", "butterfly.json", "--seed", "5")[1]
    assert blocks[2].split("\n", 1)[1].rstrip("\n") == single.rstrip("\n")


def test_epr_cli(capsys):
    code, out, _ = run_cli(capsys, "epr", "butterfly.json")
    assert code == 0
    assert "pairs: 2" in out and "classical: 7 bits, all reverse" in out
    code, out, _ = run_cli(capsys, "epr", "identity.json")
    assert code == 0 and "classical: 0 bits" in out
    code, out, _ = run_cli(capsys, "epr", "chain_d3.json")
    assert code == 0 and "extension" in out


def test_not_a_solution_run_exit(capsys, tmp_path):
    doc = bfly_doc()
    doc["coding"]["n1"] = [[0], [0], [0], [1]]
    assert run_cli(capsys, "run", write(tmp_path, doc))[0] == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qnetcode", "verify", "identity.json"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "SOLUTION (linear)"
