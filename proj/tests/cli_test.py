#!/usr/bin/env python3
"""End-to-end checks of the teachqa command-line tool.

usage: cli_test.py TEACHQA_BINARY COUNT_LAW_SCRIPT
"""

import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

BIN = sys.argv[1]
COUNT_LAW = sys.argv[2]
failures = []


def run(*args, workspace=None, stdin=None):
    cmd = [BIN] + (["-w", str(workspace)] if workspace else []) + [str(a) for a in args]
    return subprocess.run(cmd, capture_output=True, text=True, input=stdin, timeout=120)


def check(cond, what):
    print(("ok    " if cond else "FAIL  ") + what)
    if not cond:
        failures.append(what)


def pipeline(root):
    ws = root / "ws"
    check(run("init", ws).returncode == 0, "init exits 0")
    check(run("init", ws).returncode == 1, "init refuses an existing workspace")
    check(run("validate", workspace=ws).returncode == 0, "validate exits 0 on the sample")
    gen = run("generate", workspace=ws)
    check(gen.returncode == 0, "generate exits 0")
    report = json.loads(gen.stdout)
    oracle = subprocess.run([sys.executable, COUNT_LAW, str(ws), "--check"], capture_output=True, text=True)
    check(oracle.returncode == 0 and int(oracle.stdout) == report["raw_count"],
          f"generate raw_count {report['raw_count']} matches the count script")
    train = run("train", "--seed", "42", workspace=ws)
    check(train.returncode == 0, "train exits 0")
    ev = run("eval", workspace=ws)
    check(ev.returncode == 0, "eval exits 0")
    ask = run("ask", "Who teaches this class?", workspace=ws)
    answer = json.loads(ask.stdout) if ask.returncode == 0 else {}
    check(answer.get("intent") == "teachingstaff" and answer.get("status") == "answered",
          "ask 'Who teaches this class?' -> teachingstaff")
    return ws, train.stdout, ev.stdout


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    (tmp / "a").mkdir()
    (tmp / "b").mkdir()
    ws_a, train_a, eval_a = pipeline(tmp / "a")
    ws_b, train_b, eval_b = pipeline(tmp / "b")
    for name in ["dataset.jsonl", "model.json", "holdout.jsonl"]:
        check((ws_a / name).read_bytes() == (ws_b / name).read_bytes(), f"{name} identical across runs")
    check(train_a == train_b and eval_a == eval_b, "train and eval reports identical across runs")

    out = tmp / "other.jsonl"
    check(run("generate", "--out", out, workspace=ws_a).returncode == 0 and
          out.read_bytes() == (ws_a / "dataset.jsonl").read_bytes(), "generate --out writes the dataset")

    # A duplicate label fails validation with the code on stderr.
    kb = json.loads((ws_a / "kb.json").read_text())
    kb["categories"].append({"label": "grade", "kind": "structured"})
    (ws_a / "kb.json").write_text(json.dumps(kb))
    bad = run("validate", workspace=ws_a)
    check(bad.returncode == 1 and "DUPLICATE_LABEL" in bad.stderr, "validate: duplicate label -> exit 1")
    check(run("generate", workspace=ws_a).returncode == 1, "generate refuses an invalid kb")

    corpus = tmp / "corpus.txt"
    corpus.write_text("when is assignment 1 due\nwhen is assignment 2 due\n"
                      '{"question": "who teaches this class", "intent": "teachingstaff"}\n')
    sug = run("suggest", "--corpus", corpus)
    skeletons = [s["skeleton"] for s in json.loads(sug.stdout)["suggestions"]] if sug.returncode == 0 else []
    check("when is {object} due" in skeletons, "suggest finds 'when is {object} due'")

    check(run("frobnicate").returncode == 2, "unknown command -> exit 2")
    check(run("train", "--alpha", "-1", workspace=ws_b).returncode == 2, "negative alpha -> exit 2")
    check(run("ask", workspace=ws_b).returncode == 2, "ask without a question -> exit 2")
    check(run("eval", "--threshold", "1.5", workspace=ws_b).returncode == 2, "threshold out of range -> exit 2")
    empty = tmp / "empty"
    empty.mkdir()
    check(run("ask", "hi", workspace=empty).returncode == 1, "ask in an empty directory -> exit 1")
    fresh = tmp / "fresh"
    run("init", fresh)
    check(run("train", workspace=fresh).returncode == 1, "train before generate -> exit 1")
    env = dict(os.environ, TEACHQA_WORKSPACE=str(ws_b))
    via_env = subprocess.run([BIN, "ask", "when is assignment 1 due"], capture_output=True, text=True, env=env)
    check(via_env.returncode == 0 and json.loads(via_env.stdout)["intent"] == "duedate",
          "TEACHQA_WORKSPACE selects the workspace")

if failures:
    print(f"{len(failures)} check(s) failed", file=sys.stderr)
    sys.exit(1)
