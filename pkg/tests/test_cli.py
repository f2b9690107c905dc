import io
import json
from contextlib import redirect_stdout, redirect_stderr
from pathlib import Path


from cdcalc.cli import run

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"

KDV_PROB = str(DATA / "kdv.prob")
KDV_FORMS = str(DATA / "kdv_sl2.forms")
DERHAM = str(DATA / "derham2.cplx")


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = run(list(argv))
    return code, out.getvalue(), err.getvalue()


def test_linearize_golden():
    code, out, _ = invoke("linearize", KDV_PROB)
    assert code == 0
    assert "order: 3" in out
    assert "-u_x - u*D_{x} + D_{t} - D_{x,x,x}" in out


def test_adjoint_golden():
    code, out, _ = invoke("adjoint", KDV_PROB)
    assert code == 0
    assert "u*D_{x} - D_{t} + D_{x,x,x}" in out


def test_linearize_round_trip():
    from cdcalc import parse_operator_matrix, parse_problem, linearize
    code, out, _ = invoke("linearize", KDV_PROB)
    matrix_text = out.split("matrix:\n", 1)[1]
    prob = parse_problem(Path(KDV_PROB).read_text())
    op = linearize(prob.ctx_free, prob.equations)
    assert parse_operator_matrix(matrix_text, prob.ctx_free) == op


def test_symbol_command():
    code, out, _ = invoke("symbol", KDV_PROB)
    assert code == 0
    assert "-xi_x^3" in out


def test_spencer_and_involutive():
    code, out, _ = invoke("spencer", KDV_PROB, "--l-max", "2")
    assert code == 0
    assert "involutive_up_to: 2" in out
    code, out, _ = invoke("involutive", KDV_PROB, "--l-max", "3")
    assert code == 0
    assert "involutive_up_to: 3" in out


def test_exactness_command():
    code, out, _ = invoke("exactness", DERHAM, "--l-max", "2")
    assert code == 0
    assert "dims 6 -> 6 -> 1, ranks 5 1, defect 0, exact" in out
    assert "all_exact: yes (tested l <= 2)" in out


def test_coker_command():
    code, out, _ = invoke("coker", KDV_PROB, "--k1", "1")
    assert code == 0
    assert "cokernel_rank: 0" in out


def test_kline_command():
    code, out, _ = invoke("kline", "--k", "2", "--n", "2")
    assert code == 0
    assert "E1 vanishing: E1^{p,q} = 0 for p > 0 and q <= 0" in out
    assert "C-cohomology vanishing: H^i = 0 for i >= 2" in out


def test_zcr_command():
    code, out, _ = invoke("zcr", KDV_PROB, "--forms", KDV_FORMS)
    assert code == 0
    assert out.strip() == "residual: 0 (zero-curvature representation verified)"


def test_zcr_perturbed_reports_entries(tmp_path):
    text = Path(KDV_FORMS).read_text().replace("1/6 ; 0", "1/5 ; 0")
    forms = tmp_path / "bad.forms"
    forms.write_text(text)
    code, out, _ = invoke("zcr", KDV_PROB, "--forms", str(forms))
    assert code == 0
    assert "residual: nonzero" in out


def test_two_line_command():
    code, out, _ = invoke("two-line", "--k", "3", "--p", "2", "--sign", "+")
    assert code == 0
    assert "nonzero: true" in out
    assert "polynomial:" in out
    code, out, _ = invoke("two-line", "--k", "1", "--p", "2", "--sign", "-")
    assert "nonzero: false" in out


def test_pform_commands():
    code, out, _ = invoke("pform-epi", "--n", "4", "--p", "1",
                          "--metric", "diag(1,1,1,1)", "--xi", "1,0,0,0")
    assert code == 0
    assert "surjective: true" in out and "rank: 6" in out
    code, out, _ = invoke("pform-table", "--n", "4", "--p", "1")
    assert code == 0
    assert "(0, 0, 1)" in out and "(1, 2, 1)" in out


def test_json_mode_is_structured():
    code, out, _ = invoke("pform-table", "--n", "4", "--p", "1", "--json")
    data = json.loads(out)
    assert data["entries"] == [[0, 0, 1], [0, 2, 1], [1, 2, 1]]
    code, out, _ = invoke("kline", "--k", "2", "--n", "4", "--json")
    assert json.loads(out)["e1_zero_for_q_le"] == 2


def test_determinism_byte_identical():
    for argv in (
        ("linearize", KDV_PROB),
        ("spencer", KDV_PROB, "--l-max", "2", "--seed", "5"),
        ("exactness", DERHAM, "--l-max", "1", "--seed", "3"),
        ("zcr", KDV_PROB, "--forms", KDV_FORMS),
        ("pform-table", "--n", "6", "--p", "3", "--json"),
    ):
        first = invoke(*argv)
        second = invoke(*argv)
        assert first == second
        assert first[0] == 0


def test_explicit_point_file(tmp_path):
    point = tmp_path / "pt.point"
    point.write_text(
        "x = 1\nt = 2\nlam = 0\nu = 3\nu_x = -1/2\nu_t = 5\n"
        "u_xx = 1\nu_{x,t} = 2\nu_tt = -3\n"
        "u_xxx = 1\nu_{x,x,t} = 1\nu_{x,t,t} = 1\nu_ttt = 1\n"
        "u_xxxx = 1\nu_{x,x,x,t} = 1\nu_{x,x,t,t} = 1\nu_{x,t,t,t} = 1\nu_tttt = 1\n")
    code, out, _ = invoke("symbol", KDV_PROB, "--point", str(point))
    assert code == 0 and "-xi_x^3" in out
    code, out, _ = invoke("coker", KDV_PROB, "--k1", "1", "--point", str(point))
    assert code == 0 and "cokernel_rank: 0" in out
    code, out, _ = invoke("spencer", KDV_PROB, "--l-max", "1", "--point", str(point))
    assert code == 0 and "involutive_up_to: 1" in out


def test_insufficient_point_file_is_domain_error(tmp_path):
    point = tmp_path / "pt.point"
    point.write_text("x = 1\nt = 2\nlam = 0\nu = 3\n")
    code, _, err = invoke("coker", KDV_PROB, "--k1", "1", "--point", str(point))
    assert code == 1
    assert "error:" in err


def test_domain_error_exit_1(tmp_path):
    bad = tmp_path / "bad.prob"
    bad.write_text("independent x t\ndependent u\nequation u_t - w\n")
    code, out, err = invoke("linearize", str(bad))
    assert code == 1
    assert "error:" in err


def test_missing_file_exit_1():
    code, _, err = invoke("linearize", "no-such-file.prob")
    assert code == 1
    assert "error:" in err


def test_usage_error_exit_2():
    code, _, _ = invoke("no-such-command")
    assert code == 2
    code, _, _ = invoke("two-line", "--k", "2")
    assert code == 2
