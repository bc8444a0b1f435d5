"""Command line front end over the construction library.

Five subcommands cover the library surface: ``check`` audits metric axioms,
``build`` runs a named construction and reports its certificates,
``metrize`` turns a fundamental sequence of covers into an exact metric,
``embed`` runs the sequence-space embedding pipeline, and ``invlim``
analyzes inverse-sequence truncations.  Every run emits one canonical JSON
report (schema in docs/report-schema.json) to stdout or to --out.

Exit codes: 0 when every check passes, 1 for mathematical failures
(violated preconditions or failing check rows), 2 for input errors
(unreadable files, malformed JSON, unknown commands).
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional

from .cones import (
    cone_metric,
    cone_quotient_check,
    join_amalgam_equality,
    join_metric,
)
from .covers import au_metrize, validate_fundamental_sequence
from .cylinders import cylinder_adjunction_check, mapping_cylinder_metric
from .embedding import aharoni_embed, sufficient_depth
from .errors import PreconditionError, StructuralError
from .gluing import adjunction_space
from .invlim import (
    cauchy_report,
    convergence_report,
    level_anchor_verdict,
    level_shadow_reached,
    mittag_leffler_report,
    perturbation_limit,
    separation_index,
    telescope_metric,
    thread_space,
    threads,
)
from .jsonio import (
    fundamental_sequence_from_json,
    label_to_json,
    ladder_from_json,
    load_document,
    mapping_from_json,
    scalar_from_json,
    sequence_point_to_json,
    space_from_json,
    space_to_json,
    subset_from_json,
    surjection_from_json,
    truncation_from_json,
)
from .quotients import amalgamated_union, quotient_by_discrete_family
from .reporting import ReportBuilder, canonical_bytes, digest_inputs
from .scalars import ONE, ZERO, Scalar, as_scalar
from .spaces import FiniteMetricSpace, check_metric_axioms

# ---- constants ----

AXIOM_NAMES = ("diagonal", "nonnegativity", "symmetry", "positivity", "triangle")
BUILD_KINDS = (
    "cone",
    "join",
    "cylinder",
    "adjunction",
    "amalgam",
    "quotient",
    "telescope",
)
INVLIM_MODES = ("threads", "ml", "converge", "cauchy", "separate", "perturb")
DEFAULT_UNIT_GRID = "0,1/2,1"
DEFAULT_JOIN_GRID = "-1,-1/2,0,1/2,1"


# ---- flag parsing ----


def _seed_value(text: str) -> int:
    try:
        value = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"seed must be an integer, got {text!r}"
        ) from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _parse_grid(text: str, low: Scalar, high: Scalar, required) -> tuple:
    """Parse a comma separated rational grid, mirroring the builders' checks.

    Grid problems are precondition failures (exit 1), not document errors:
    the grid is a construction parameter, not part of the input file.
    """
    values = set()
    for token in text.split(","):
        token = token.strip()
        if not token:
            raise PreconditionError("grid has an empty entry")
        try:
            values.add(as_scalar(token))
        except ValueError:
            raise PreconditionError(
                f"grid entry {token!r} is not a rational"
            ) from None
    for t in sorted(values):
        if not low <= t <= high:
            raise PreconditionError(f"grid value {t} outside [{low}, {high}]")
    for needed in required:
        if needed not in values:
            raise PreconditionError(f"grid must contain {needed}")
    return tuple(sorted(values))


def _section(doc, key: str, what: str):
    if not isinstance(doc, dict):
        raise StructuralError(f"{what} file must be a JSON object")
    if key not in doc:
        raise StructuralError(f"{what} file needs key {key!r}")
    return doc[key]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unimet",
        description="exact metric constructions on finite spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--seed",
            type=_seed_value,
            default=None,
            help="unsigned 64-bit seed folded into the input digest",
        )
        p.add_argument(
            "--oracle",
            action="store_true",
            help="re-run the brute-force oracle alongside the fast path",
        )
        p.add_argument(
            "--out",
            default=None,
            help="write the report to this path instead of stdout",
        )

    p = sub.add_parser("check", help="audit the metric axioms of a space file")
    p.add_argument("path", help="JSON space file")
    p.add_argument(
        "--pseudo",
        action="store_true",
        help="accept distance zero between distinct points",
    )
    common(p)

    p = sub.add_parser("build", help="run a construction and certify it")
    p.add_argument("kind", choices=BUILD_KINDS)
    p.add_argument("path", help="JSON input bundle for the chosen kind")
    p.add_argument(
        "--grid",
        default=None,
        help="comma separated rational parameter values",
    )
    p.add_argument(
        "--depth",
        type=int,
        default=None,
        help="stop level for telescope builds",
    )
    common(p)

    p = sub.add_parser("metrize", help="metrize a fundamental sequence of covers")
    p.add_argument("path", help="JSON fundamental sequence file")
    common(p)

    p = sub.add_parser("embed", help="embed a space into weighted sequence space")
    p.add_argument("path", help="JSON space file")
    p.add_argument(
        "--depth",
        type=int,
        default=None,
        help="number of scales (default: enough to separate points)",
    )
    p.add_argument(
        "--rescale",
        action="store_true",
        help="rescale the space to diameter 1 first",
    )
    common(p)

    p = sub.add_parser("invlim", help="analyze an inverse sequence truncation")
    p.add_argument("mode", choices=INVLIM_MODES)
    p.add_argument(
        "path",
        help="JSON truncation file (perturb: with cross, alphas, betas)",
    )
    common(p)

    return parser


# ---- report assembly helpers ----


def _flag_echo(args: argparse.Namespace) -> list:
    flags = []
    if args.seed is not None:
        flags.append(f"--seed={args.seed}")
    if args.oracle:
        flags.append("--oracle")
    if getattr(args, "pseudo", False):
        flags.append("--pseudo")
    if getattr(args, "rescale", False):
        flags.append("--rescale")
    if getattr(args, "grid", None) is not None:
        flags.append(f"--grid={args.grid}")
    if getattr(args, "depth", None) is not None:
        flags.append(f"--depth={args.depth}")
    return sorted(flags)


def _builder(args: argparse.Namespace, *extra: str) -> ReportBuilder:
    # --out is left out of the echo: it does not affect the computation.
    echo = [args.command, *extra, os.path.basename(args.path)] + _flag_echo(args)
    return ReportBuilder(echo, digest_inputs([args.path], args.seed))


def _violation_witness(violation) -> dict:
    return {
        "axiom": violation.axiom,
        "points": violation.witness,
        "lhs": violation.lhs,
        "rhs": violation.rhs,
    }


def _metric_row(builder: ReportBuilder, name: str, space: FiniteMetricSpace) -> bool:
    audit = check_metric_axioms(space)
    return builder.check(
        name, audit.ok, witnesses=[_violation_witness(v) for v in audit.violations]
    )


# ---- check ----


def _cmd_check(args: argparse.Namespace) -> ReportBuilder:
    space = space_from_json(load_document(args.path))
    builder = _builder(args)
    builder.info(
        "space loaded",
        scalars={"points": space.n, "diameter": space.diameter()},
    )
    audit = check_metric_axioms(space, allow_pseudo=True if args.pseudo else None)
    by_axiom = {v.axiom: v for v in audit.violations}
    for axiom in AXIOM_NAMES:
        if axiom == "positivity" and audit.allow_pseudo:
            builder.info("axiom positivity waived for pseudometrics")
            continue
        violation = by_axiom.get(axiom)
        builder.check(
            f"axiom {axiom}",
            violation is None,
            witnesses=[] if violation is None else [_violation_witness(violation)],
        )
    return builder


# ---- build ----


def _build_cone(args: argparse.Namespace, doc, builder: ReportBuilder) -> None:
    base = space_from_json(doc)
    grid = _parse_grid(args.grid or DEFAULT_UNIT_GRID, ZERO, ONE, (ZERO, ONE))
    cone = cone_metric(base, grid)
    _metric_row(builder, "cone satisfies the metric axioms", cone.space)
    builder.check(
        "base slice embeds isometrically",
        all(
            cone.space.d(cone.class_index(i, ZERO), cone.class_index(j, ZERO))
            == base.d(i, j)
            for i in range(base.n)
            for j in range(base.n)
        ),
    )
    if args.oracle:
        gap = cone_quotient_check(base, grid)
        builder.check(
            "cone formula matches the collapsed-slice quotient",
            gap == 0,
            scalars={"gap": gap},
        )
    builder.info("constructed space", witnesses=[space_to_json(cone.space)])


def _build_join(args: argparse.Namespace, doc, builder: ReportBuilder) -> None:
    left = space_from_json(_section(doc, "left", "join"))
    right = space_from_json(_section(doc, "right", "join"))
    grid = _parse_grid(args.grid or DEFAULT_JOIN_GRID, -ONE, ONE, (-ONE, ONE))
    if args.oracle and ZERO not in grid:
        raise PreconditionError("the amalgam comparison needs 0 in the grid")
    join = join_metric(left, right, grid)
    _metric_row(builder, "join satisfies the metric axioms", join.space)
    builder.check(
        "left factor embeds isometrically",
        all(
            join.space.d(join.xend_index(i), join.xend_index(k)) == left.d(i, k)
            for i in range(left.n)
            for k in range(left.n)
        ),
    )
    builder.check(
        "right factor embeds isometrically",
        all(
            join.space.d(join.yend_index(j), join.yend_index(k)) == right.d(j, k)
            for j in range(right.n)
            for k in range(right.n)
        ),
    )
    if args.oracle:
        comparison = join_amalgam_equality(left, right, grid)
        builder.check(
            "join equals the glued union of cone products",
            comparison.equal,
            scalars={"max_discrepancy": comparison.max_discrepancy},
        )
        builder.check(
            "two chain hops settle the glued union",
            comparison.two_hops_suffice,
        )
    builder.info("constructed space", witnesses=[space_to_json(join.space)])


def _build_cylinder(args: argparse.Namespace, doc, builder: ReportBuilder) -> None:
    source = space_from_json(_section(doc, "source", "cylinder"))
    target = space_from_json(_section(doc, "target", "cylinder"))
    mapping = mapping_from_json(_section(doc, "mapping", "cylinder"))
    grid = _parse_grid(args.grid or DEFAULT_UNIT_GRID, ZERO, ONE, (ZERO, ONE))
    cylinder = mapping_cylinder_metric(source, target, mapping, grid)
    _metric_row(builder, "cylinder satisfies the metric axioms", cylinder.space)
    builder.check(
        "target copy embeds isometrically",
        all(
            cylinder.space.d(cylinder.y_index(i), cylinder.y_index(j))
            == target.d(i, j)
            for i in range(target.n)
            for j in range(target.n)
        ),
    )
    builder.check(
        "bottom slice carries the adjusted metric",
        all(
            cylinder.space.d(
                cylinder.class_index(x, ZERO), cylinder.class_index(y, ZERO)
            )
            == cylinder.adjusted.d(x, y)
            for x in range(source.n)
            for y in range(source.n)
        ),
    )
    if args.oracle:
        gap = cylinder_adjunction_check(cylinder)
        builder.check(
            "cylinder matches the attachment pipeline",
            gap == 0,
            scalars={"gap": gap},
        )
    builder.info("constructed space", witnesses=[space_to_json(cylinder.space)])


def _build_adjunction(args: argparse.Namespace, doc, builder: ReportBuilder) -> None:
    space = space_from_json(_section(doc, "space", "adjunction"))
    subset = subset_from_json(_section(doc, "subset", "adjunction"))
    target = space_from_json(_section(doc, "target", "adjunction"))
    attaching = mapping_from_json(_section(doc, "attaching", "adjunction"))
    cross = scalar_from_json(doc["cross"]) if "cross" in doc else None
    extension = space_from_json(doc["extension"]) if "extension" in doc else None
    result = adjunction_space(
        space, subset, target, attaching, cross=cross, extension=extension
    )
    builder.check("three-hop distance equals the chain limit", result.d3_equals_dinf)
    builder.check("result satisfies the metric axioms", result.metric_ok)
    builder.check("target embeds isometrically", result.y_isometric)
    builder.check(
        "points off the subset keep positive clearance", result.positivity_ok
    )
    builder.info("constructed space", witnesses=[space_to_json(result.space)])


def _build_amalgam(args: argparse.Namespace, doc, builder: ReportBuilder) -> None:
    left = space_from_json(_section(doc, "left", "amalgam"))
    right = space_from_json(_section(doc, "right", "amalgam"))
    gluing = mapping_from_json(_section(doc, "gluing", "amalgam"))
    space = amalgamated_union(left, right, gluing)
    _metric_row(builder, "amalgam satisfies the metric axioms", space)
    builder.info("constructed space", witnesses=[space_to_json(space)])


def _build_quotient(args: argparse.Namespace, doc, builder: ReportBuilder) -> None:
    space = space_from_json(_section(doc, "space", "quotient"))
    if isinstance(doc, dict) and "family" in doc:
        raw = doc["family"]
        if not isinstance(raw, list):
            raise StructuralError("quotient family must be an array of index arrays")
        family = [subset_from_json(item) for item in raw]
    elif isinstance(doc, dict) and "class_of" in doc:
        sur = surjection_from_json(doc, space)
        classes: list = [[] for _ in range(sur.class_count)]
        for i, c in enumerate(sur.class_of):
            classes[c].append(i)
        family = classes
    else:
        raise StructuralError("quotient file needs key 'family' or 'class_of'")
    result = quotient_by_discrete_family(space, family)
    builder.check("two-hop distance equals the chain limit", result.d2_equals_dinf)
    _metric_row(builder, "quotient satisfies the metric axioms", result.space)
    builder.info("chain settles", scalars={"settled_at": result.settled_at})
    builder.info("constructed space", witnesses=[space_to_json(result.space)])


def _build_telescope(args: argparse.Namespace, doc, builder: ReportBuilder) -> None:
    truncation = truncation_from_json(doc)
    stop = truncation.top if args.depth is None else args.depth
    if not 0 <= stop <= truncation.top:
        raise PreconditionError(
            f"telescope stop level {stop} outside 0..{truncation.top}"
        )
    grid = _parse_grid(args.grid or DEFAULT_UNIT_GRID, ZERO, ONE, (ZERO, ONE))
    result = telescope_metric(truncation, 0, stop, grid)
    if isinstance(result, FiniteMetricSpace):
        builder.info("telescope over a single level is that level")
        space = result
    else:
        builder.check("every stage is certified", result.all_certified)
        space = result.space
    _metric_row(builder, "telescope satisfies the metric axioms", space)
    builder.info("constructed space", witnesses=[space_to_json(space)])


_BUILDERS = {
    "cone": _build_cone,
    "join": _build_join,
    "cylinder": _build_cylinder,
    "adjunction": _build_adjunction,
    "amalgam": _build_amalgam,
    "quotient": _build_quotient,
    "telescope": _build_telescope,
}


def _cmd_build(args: argparse.Namespace) -> ReportBuilder:
    doc = load_document(args.path)
    builder = _builder(args, args.kind)
    _BUILDERS[args.kind](args, doc, builder)
    return builder


# ---- metrize ----


def _cmd_metrize(args: argparse.Namespace) -> ReportBuilder:
    seq = fundamental_sequence_from_json(load_document(args.path))
    builder = _builder(args)
    witness = validate_fundamental_sequence(seq)
    ok = builder.check(
        "each cover star-refines its predecessor",
        witness is None,
        witnesses=[]
        if witness is None
        else [{"level": witness[0], "member": witness[1]}],
    )
    if not ok:
        return builder
    result = au_metrize(seq)
    failures = list(result.witnesses)
    builder.check(
        "gauge within a factor two of the metric",
        result.comparison_ok,
        witnesses=[w for w in failures if w[0] == "comparison"],
    )
    builder.check(
        "level 2n members have diameter at most 2^-n",
        result.member_diameter_ok,
        witnesses=[w for w in failures if w[0] == "member_diameter"],
    )
    builder.check(
        "sets of diameter at most 2^-(n+1) sit inside level 2n-1 members",
        result.clique_containment_ok,
        witnesses=[w for w in failures if w[0] == "clique_containment"],
    )
    builder.info("constructed space", witnesses=[space_to_json(result.space)])
    return builder


# ---- embed ----


def _cmd_embed(args: argparse.Namespace) -> ReportBuilder:
    space = space_from_json(load_document(args.path))
    builder = _builder(args)
    if args.rescale:
        space = space.rescaled_to_diameter(ONE)
        builder.info("space rescaled to diameter 1")
    depth = sufficient_depth(space) if args.depth is None else args.depth
    if depth < 1:
        raise PreconditionError("embedding depth must be at least 1")
    embedding = aharoni_embed(space, depth)
    builder.info("embedding depth", scalars={"depth": depth})
    builder.check("map is nonexpansive", embedding.certificate.nonexpansive_ok)
    builder.check(
        "level coordinates respect their caps",
        embedding.certificate.coordinate_bounds_ok,
    )
    for row in embedding.certificate.separation:
        builder.check(
            f"separation at level {row.level}",
            row.holds,
            scalars={
                "image_threshold": row.image_threshold,
                "point_bound": row.point_bound,
            },
        )
    builder.check("map is injective", embedding.certificate.injective)
    builder.info(
        "modulus of continuity",
        witnesses=[list(pair) for pair in embedding.certificate.continuity.rows],
    )
    builder.info(
        "embedded images",
        witnesses=[
            {
                "point": label_to_json(space.points[i]),
                "image": sequence_point_to_json(embedding.images[i]),
            }
            for i in range(space.n)
        ],
    )
    return builder


# ---- invlim ----


def _invlim_threads(truncation, builder: ReportBuilder) -> None:
    found = threads(truncation)
    builder.check(
        "one thread per top-level point",
        len(found) == truncation.levels[truncation.top].n,
        scalars={"threads": len(found)},
    )
    builder.check(
        "every thread is bond compatible",
        all(t.compatible_with(truncation) for t in found),
    )
    builder.info(
        "threads",
        witnesses=[[label_to_json(e) for e in t.entries] for t in found],
    )


def _invlim_ml(truncation, builder: ReportBuilder) -> None:
    report = mittag_leffler_report(truncation)
    for row in report.rows:
        builder.check(
            f"image chain at level {row.level} stabilizes inside the window",
            row.stabilized,
            witnesses=[] if row.stabilized else [list(row.images)],
            scalars={}
            if row.stabilized_at is None
            else {"stabilized_at": row.stabilized_at},
        )


def _invlim_converge(truncation, builder: ReportBuilder) -> None:
    report = convergence_report(truncation)
    for level in range(truncation.top + 1):
        builder.check(
            f"images reach the shadow at level {level} inside the window",
            level_shadow_reached(truncation, level),
        )
        for row in report.rows:
            if row.level != level:
                continue
            builder.info(
                "convergence row",
                scalars={
                    "level": row.level,
                    "epsilon": row.epsilon,
                    "holds_from": row.holds_from,
                    "witnessed": row.witnessed,
                },
            )


def _invlim_cauchy(truncation, builder: ReportBuilder) -> None:
    report = cauchy_report(truncation)
    for level in range(truncation.top + 1):
        verdict = level_anchor_verdict(truncation, level)
        witnesses = []
        scalars = {}
        if verdict.stabilized:
            witnesses.append("image chain stabilizes")
        if verdict.short_window:
            witnesses.append("window too short to judge; vacuous pass")
        if verdict.anchor_scale is not None:
            scalars = {
                "anchor_scale": verdict.anchor_scale,
                "anchor_from": verdict.anchor_from,
            }
        builder.check(
            f"tails cluster at level {level} inside the window",
            verdict.anchored,
            witnesses=witnesses,
            scalars=scalars,
        )
        for row in report.rows:
            if row.level != level:
                continue
            builder.info(
                "cauchy row",
                scalars={
                    "level": row.level,
                    "epsilon": row.epsilon,
                    "holds_from": row.holds_from,
                    "witnessed": row.witnessed,
                },
            )


def _invlim_separate(truncation, builder: ReportBuilder) -> None:
    ts = thread_space(truncation)
    builder.info(
        "thread space",
        scalars={"threads": ts.space.n, "diameter": ts.space.diameter()},
    )
    for eps in ts.space.spectrum():
        result = separation_index(truncation, eps)
        builder.check(
            f"separation index exists for epsilon {eps}",
            result.found,
            scalars={
                "epsilon": eps,
                "level": result.level,
                "threshold": result.threshold,
            },
        )


def _invlim_perturb(doc, builder: ReportBuilder) -> None:
    data = ladder_from_json(doc)
    report = perturbation_limit(data)
    for row in report.square_rows:
        builder.check(
            f"ladder square at level {row.level} stays within its budget",
            row.ok,
            witnesses=[] if row.witness is None else [row.witness],
            scalars={"budget": row.budget, "measured": row.measured},
        )
    for row in report.continuity_rows:
        builder.check(
            f"bonds from level {row.upper} to {row.lower} honor the alpha budget",
            row.ok,
            witnesses=[] if row.witness is None else [row.witness],
            scalars={"alpha": row.alpha, "bound": row.bound, "attained": row.attained},
        )
    for row in report.telescoping_rows:
        builder.check(
            f"telescoping step {row.stage} at level {row.level} within bound",
            row.ok,
            scalars={"bound": row.bound, "measured": row.measured},
        )
    for row in report.limit_rows:
        builder.check(
            f"limit map at level {row.level} within twice beta",
            row.ok,
            witnesses=[] if row.witness is None else [row.witness],
            scalars={"bound": row.bound, "measured": row.measured},
        )
    builder.info("limit thread map", witnesses=[list(report.thread_map)])
    if report.separation_note is not None:
        builder.info(
            "thread metric sections skipped", witnesses=[report.separation_note]
        )
    if report.unique is not None:
        for row in report.uniqueness_rows:
            builder.info(
                "uniqueness threshold",
                scalars={
                    "level": row.level,
                    "threshold": row.threshold,
                    "forced": row.forced,
                },
            )
        builder.info(
            "limit map pinned within thresholds", scalars={"unique": report.unique}
        )
    if report.injective_certified is not None:
        for row in report.injectivity_rows:
            builder.info(
                "injectivity constants",
                scalars={
                    "level": row.level,
                    "gamma": row.gamma,
                    "epsilon": row.epsilon,
                },
            )
        builder.check(
            "certified injectivity is observed",
            (not report.injective_certified) or report.injective_observed,
            scalars={
                "certified": report.injective_certified,
                "observed": report.injective_observed,
            },
        )


def _cmd_invlim(args: argparse.Namespace) -> ReportBuilder:
    doc = load_document(args.path)
    builder = _builder(args, args.mode)
    if args.mode == "perturb":
        _invlim_perturb(doc, builder)
        return builder
    truncation = truncation_from_json(doc)
    handler = {
        "threads": _invlim_threads,
        "ml": _invlim_ml,
        "converge": _invlim_converge,
        "cauchy": _invlim_cauchy,
        "separate": _invlim_separate,
    }[args.mode]
    handler(truncation, builder)
    return builder


# ---- entry point ----

_COMMANDS = {
    "check": _cmd_check,
    "build": _cmd_build,
    "metrize": _cmd_metrize,
    "embed": _cmd_embed,
    "invlim": _cmd_invlim,
}


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        builder = _COMMANDS[args.command](args)
    except StructuralError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return 1
    status = 0 if builder.all_passed else 1
    data = canonical_bytes(builder.finish(status))
    if args.out:
        try:
            with open(args.out, "wb") as handle:
                handle.write(data)
        except OSError as exc:
            print(f"cannot write report: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(data.decode("ascii"))
    return status


if __name__ == "__main__":
    sys.exit(main())
