"""One test per acceptance criterion; each prints a PASS/FAIL line, collected in the terminal summary."""
from __future__ import annotations

import os
import subprocess
import sys

import pytest

from hyperdet import acceptance

from .conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("name", list(acceptance.CRITERIA))
def test_criterion(name, acceptance_ctx):
    res = acceptance.run(name, acceptance_ctx)
    line = acceptance.format_line(name, res)
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert res.ok, line


@pytest.mark.slow
def test_cli_verify_all_seed_42(tmp_path):
    env = dict(os.environ, HYPERDET_CACHE=str(tmp_path))
    res = subprocess.run([sys.executable, "-m", "hyperdet", "verify", "all", "--seed", "42"],
                         capture_output=True, text=True, env=env)
    ok = res.returncode == 0
    line = f"[{'PASS' if ok else 'FAIL'}] end-to-end (cli): `hyperdet verify all --seed 42` exit {res.returncode}"
    print(res.stdout)
    ACCEPTANCE_LINES.append(line)
    assert ok, res.stdout + res.stderr
