import io
import re
import signal
import subprocess
import sys

import pytest

from modelforge.cli import (
    OPTION_SUMMARY, SearchConfig, UsageError, filter_identities, parse_args, run, search,
)
from modelforge.errors import ExitCode
from modelforge.lang import parse_input

from conftest import FIXTURES, fixture_text, run_cli

BANNER = re.compile(r"^======================= Model #(\d+) at \d+\.\d\d seconds:$", re.M)


def strip_times(text):
    return re.sub(r"\d+\.\d\d seconds", "_ seconds", text)


# --- arguments ---------------------------------------------------------------------


@pytest.mark.parametrize("argv,sizes", [
    ([], [2]),
    (["-n4"], [4]),
    (["-N6"], [2, 3, 4, 5, 6]),
    (["-n4", "-N6"], [4, 5, 6]),
    (["-n", "3", "-N", "3"], [3]),
])
def test_sizes(argv, sizes):
    assert parse_args(argv).sizes == sizes


def test_defaults():
    c = parse_args([])
    assert (c.max_models, c.max_seconds, c.max_kbytes) == (1, None, 48000)
    assert not (c.print_tabular or c.print_parsable or c.print_ivy or c.distinct_constants
                or c.qg_symmetry)


def test_flags():
    c = parse_args(["-c", "-p", "-P", "-I", "-x", "-m", "5", "-t", "9", "-k", "100"])
    assert c.distinct_constants and c.print_tabular and c.print_parsable and c.print_ivy
    assert c.qg_symmetry and (c.max_models, c.max_seconds, c.max_kbytes) == (5, 9, 100)


@pytest.mark.parametrize("argv", [["-n0"], ["-n5", "-N3"], ["-m", "0"], ["-z"], ["-n", "x"],
                                  ["-t", "-1"]])
def test_usage_errors(argv):
    with pytest.raises(UsageError):
        parse_args(argv)
    assert run_cli(argv, "list(usable). end_of_list.")[0] == 19


def test_help():
    code, out = run_cli(["-h"])
    assert code == 0 and out == OPTION_SUMMARY
    for flag in "-n -N -c -p -P -I -m -t -k -x -h".split():
        assert f"  {flag} " in OPTION_SUMMARY


# --- runs ----------------------------------------------------------------------------


def test_group_n6_tabular():
    code, out = run_cli(["-N6", "-p", "-m1"], fixture_text("group.in"))
    assert code == ExitCode.MAX_MODELS == 15
    assert len(BANNER.findall(out)) == 1
    assert "Domain size 6." in out
    assert out.rstrip().splitlines()[-1].startswith("Exit 15: ")


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_group_small_sizes_unsat(n):
    assert run_cli([f"-n{n}"], fixture_text("group.in"))[0] == 12


def test_unsat_range_implies_unsat_singletons():
    text = fixture_text("group_exp2.in")
    assert run_cli(["-n2", "-N5"], text)[0] == 12
    for n in range(2, 6):
        assert run_cli([f"-n{n}"], text)[0] == 12


def test_banner_count_matches_models():
    text = fixture_text("quasigroup.in")
    code, out = run_cli(["-n3", "-m", "5", "-p"], text)
    assert code == 15 and [int(k) for k in BANNER.findall(out)] == [1, 2, 3, 4, 5]
    code, out = run_cli(["-n3", "-m", "100", "-p"], text)
    assert code == 16 and len(BANNER.findall(out)) == 12


def test_model_count_across_sizes():
    # 1 + 2 + 12 quasigroups at sizes 1..3; -m counts all of them
    text = fixture_text("quasigroup.in")
    code, out = run_cli(["-n1", "-N3", "-m", "100"], text)
    assert code == 16 and "(15 model(s)" in out
    code, out = run_cli(["-n1", "-N3", "-m", "4"], text)
    assert code == 15 and out.count("Model #") == 4
    assert "(size 3)" in out


def test_default_output_lists_models():
    code, out = run_cli(["-n3", "-m", "2"], fixture_text("even.in"))
    assert code == 15
    assert re.findall(r"^Model #(\d) \(size 3\)", out, re.M) == ["1", "2"]


def test_parsable_and_ivy_output():
    code, out = run_cli(["-n3", "-P", "-I"], fixture_text("even.in"))
    assert code == 15
    assert "% begin model 1 (size 3)" in out and "% end model 1" in out
    assert re.search(r"^\(model \(size 3\) .*\)$", out, re.M)


def test_trace_lines():
    code, out = run_cli(["-n3"], fixture_text("even.in"))
    lines = out.splitlines()
    assert lines[:3] == [
        "Processing clause: -a(v0) | even(v0).",
        "Processing clause: -s(v0,v1) | -s(v1,v2) | -even(v0) | even(v2).",
        "Processing clause: -a(v0) | -s(v0,v1) | -even(v1).",
    ]
    assert lines[3:6] == ["Domain size 3.",
                          "Function s/2 well-defined and closed.",
                          "Function a/1 well-defined and closed."]


def test_deterministic_output():
    text = fixture_text("group.in")
    a = run_cli(["-N6", "-p", "-P", "-I"], text)
    b = run_cli(["-N6", "-p", "-P", "-I"], text)
    assert a[0] == b[0] and strip_times(a[1]) == strip_times(b[1])


def test_sum_symbol_model():
    code, out = run_cli(["-n3", "-P"], fixture_text("sum.in"))
    assert code == 15
    assert "% function $SUM/2" in out and "-P(2)." in out and "P(1)." in out


def test_input_errors():
    assert run_cli([], "list(usable). f(x,y) = f(x). end_of_list.")[0] == 19
    assert run_cli([], "list(usable) P(x).")[0] == 19
    # domain element beyond the size being searched
    assert run_cli(["-n2"], "list(usable). P(5). end_of_list.")[0] == 19


def test_ignored_limit_commands():
    text = "assign(max_seconds, 0).\nassign(max_mem, 1).\n" + fixture_text("even.in")
    assert run_cli(["-n3"], text)[0] == 15


def test_empty_theory():
    code, out = run_cli(["-n1", "-m", "5"], "list(usable). end_of_list.")
    assert code == 16 and "(1 model(s)" in out


def test_distinct_constants_flag():
    text = "list(usable). a = b. end_of_list."
    assert run_cli(["-n2"], text)[0] == 15
    assert run_cli(["-n2", "-c"], text)[0] == 12


def test_qg_flag_reduces_models():
    text = fixture_text("quasigroup.in")
    plain = run_cli(["-n4", "-m", "1000"], text)
    cut = run_cli(["-n4", "-m", "1000", "-x"], text)
    assert plain[0] == cut[0] == 16
    assert "(576 model(s)" in plain[1]
    k = int(re.search(r"\((\d+) model\(s\)", cut[1]).group(1))
    assert 0 < k < 576


def test_time_limit_exit():
    code, out = run_cli(["-n7", "-m", "100000000", "-t", "1"], fixture_text("quasigroup.in"))
    assert code == 13


def test_memory_limit_exit():
    assert run_cli(["-N6", "-k", "64"], fixture_text("group.in"))[0] == 14


def test_time_limit_zero_stops_search():
    assert run_cli(["-n7", "-t", "0", "-m", "1000000"], fixture_text("quasigroup.in"))[0] == 13


def test_search_api():
    p = parse_input(fixture_text("even.in"))
    result = search(p, SearchConfig(2, 3, max_models=100))
    assert result.code == 16 and result.sizes_done == [2, 3]
    assert all(n in (2, 3) for n, _ in result.models)


def test_run_writes_to_given_streams():
    out, err = io.StringIO(), io.StringIO()
    code = run(SearchConfig(3, 3), "list(usable). P(x. end_of_list.", out, err)
    assert code == 19 and "input error" in err.getvalue()


def test_internal_failure_is_abend(monkeypatch):
    import modelforge.cli as cli

    def boom(*a, **k):
        raise RuntimeError("boom")

    monkeypatch.setattr(cli, "search", boom)
    assert run_cli(["-n2"], fixture_text("even.in"))[0] == 11


def test_recursion_is_segv(monkeypatch):
    import modelforge.cli as cli

    def deep(*a, **k):
        raise RecursionError()

    monkeypatch.setattr(cli, "search", deep)
    assert run_cli(["-n2"], fixture_text("even.in"))[0] == 18


def test_sigint_exit_code():
    code = "import sys; from modelforge.cli import main; sys.exit(int(main()))"
    proc = subprocess.Popen([sys.executable, "-c", code, "-n7", "-m", "100000000"],
                            stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True)
    proc.stdin.write(fixture_text("quasigroup.in"))
    proc.stdin.close()
    for line in proc.stdout:
        if line.startswith("Domain size 7."):
            break
    proc.send_signal(signal.SIGINT)
    proc.stdout.read()
    assert proc.wait(timeout=60) == 17


# --- filter ----------------------------------------------------------------------------


def test_filter_empty_file(tmp_path):
    f = tmp_path / "none.txt"
    f.write_text("")
    code, out = run_cli(["filter", str(f)])
    assert code == 0 and out == ""


def test_filter_commutativity():
    assert filter_identities(["f(x,y) = f(y,x)."]) == ["f(x,y) = f(y,x)."]


def test_filter_drops_satisfiable():
    assert filter_identities(["f(x,y) = x."]) == []


def test_filter_bad_line_skipped():
    err = io.StringIO()
    out = filter_identities(["f(x,y = x.", "f(x,y) = f(y,x)."], err=err)
    assert out == ["f(x,y) = f(y,x)."] and "line 1" in err.getvalue()


def test_filter_missing_file():
    assert run_cli(["filter", str(FIXTURES / "missing.txt")])[0] == 19


def test_filter_bad_bound():
    assert run_cli(["filter", str(FIXTURES / "identities.txt"), "-N", "1"])[0] == 19
