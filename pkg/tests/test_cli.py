"""Command-line surface: dispatch, formats, exit codes, round trips."""

import pytest

from torfill.cli import main
from torfill.filling import CertificateCache
from torfill.filling.base import set_default_cache


@pytest.fixture(scope="module", autouse=True)
def _cache(tmp_path_factory):
    cache = CertificateCache(tmp_path_factory.mktemp("cli-certs"))
    set_default_cache(cache)
    return cache


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    kv = dict(line.split("=", 1) for line in out.splitlines()
              if "=" in line and not line.startswith("row "))
    rows = [line[4:] for line in out.splitlines() if line.startswith("row ")]
    return code, kv, rows


def test_bounds(capsys):
    code, kv, rows = run(capsys, "bounds", "-m", "2,1;1,1")
    assert code == 0
    assert abs(float(kv["rho"]) - 2.618033988749895) < 1e-9
    assert abs(float(kv["fv_lower_ln"]) - 0.2921) < 5e-4
    assert kv["unit_root_flag"] == "False"
    assert kv["charpoly"] == "1,-3,1"


def test_bounds_unit_circle(capsys):
    code, kv, rows = run(capsys, "bounds", "-m", "0,-1;1,0")
    assert code == 0
    assert kv["unit_root_flag"] == "True"
    assert float(kv["fv_lower_ln"]) == 0.0


def test_reduce_identity(capsys):
    code, kv, rows = run(capsys, "reduce", "-m", "1,0;0,1")
    assert code == 0
    assert kv["cost"] == "0"
    assert kv["verified"] == "True"


def test_reduce_and_fill_verify_round_trip(tmp_path, capsys):
    cert_path = tmp_path / "cert.json"
    code, kv, rows = run(capsys, "reduce", "-m", "2,1;1,1", "--out", str(cert_path))
    assert code == 0 and kv["verified"] == "True"
    code, kv, rows = run(capsys, "fill", "--verify", str(cert_path))
    assert code == 0
    assert kv["verified"] == "True"


def test_fill_cycle_from_file(tmp_path, capsys):
    from torfill.chains import parallelogram_cycle
    from torfill.formats import save_chain
    # null-homologous with a small-box witness: Q(e1,e2) + Q(-e1,e2)
    z = (parallelogram_cycle([(1, 0), (0, 1)])
         + parallelogram_cycle([(-1, 0), (0, 1)]))
    path = tmp_path / "cycle.json"
    save_chain(path, z)
    out_path = tmp_path / "fill.json"
    code, kv, rows = run(capsys, "fill", "--cycle", str(path), "--out", str(out_path))
    assert code == 0
    assert int(kv["cost"]) >= 1
    code, kv, rows = run(capsys, "fill", "--verify", str(out_path))
    assert code == 0


def test_fill_unfillable_exit_code(tmp_path, capsys):
    from torfill.chains import parallelogram_cycle
    from torfill.formats import save_chain
    z = parallelogram_cycle([(1, 0), (0, 1)])  # fundamental class
    path = tmp_path / "cycle.json"
    save_chain(path, z)
    code = main(["fill", "--cycle", str(path), "--max-expand", "2"])
    capsys.readouterr()
    assert code == 2


def test_torsion(capsys):
    code, kv, rows = run(capsys, "torsion", "-m", "2,1;1,1", "--kmax", "5")
    assert code == 0
    assert rows[0].startswith("k=1 torsion=1")
    assert rows[1].startswith("k=2 torsion=5")
    assert kv["last_full_rank_k"] == "5"


def test_gelfand(capsys):
    code, kv, rows = run(capsys, "gelfand", "-m", "2,1;1,1", "--jmax", "2")
    assert code == 0
    assert abs(float(kv["tail"]) - 5 ** 0.5) < 1e-9


def test_fvupper(capsys):
    code, kv, rows = run(capsys, "fvupper", "-m", "1,1;0,1", "--jmax", "3")
    assert code == 0
    assert "k_hat_log2" in kv


def test_psl2z_family(capsys):
    code, kv, rows = run(capsys, "psl2z", "--family", "1", "--power", "2")
    assert code == 0
    assert kv["length_cyc"] == "8"
    assert kv["delta_lower"] == "8*kappa"
    assert kv["delta_upper"] == "10"  # j(i+1)+6 with i=1, j=2


def test_psl2z_matrix(capsys):
    code, kv, rows = run(capsys, "psl2z", "-m", "0,-1;1,0")
    assert code == 0
    assert kv["word"] == "S"


def test_input_errors_exit_3(capsys):
    assert main(["bounds", "-m", "2,x;1,1"]) == 3
    capsys.readouterr()
    assert main(["bounds"]) == 3
    capsys.readouterr()
    assert main(["reduce", "-m", "1,0,0,0;0,1,0,0;0,0,1,0;0,0,0,1"]) == 3
    capsys.readouterr()


def test_selftest_quick_smoke(capsys):
    # the full quick suite runs in the acceptance module; here make sure the
    # command works end to end on the cheapest criteria by running it whole
    code = main(["selftest", "--level", "quick"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("PASS") >= 10
