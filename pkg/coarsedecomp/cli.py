# coarsedecomp/cli.py

"""
cli.py

Command-line interface for coarsedecomp.

Subcommands:
    space gen|show, decompose run|verify|tree|asdim, norms len|ball|eval|nesting,
    rips build|dist|verify|smallest-m, pou build|verify, report merge.

Every command writes one JSON document to stdout or ``--out``; diagnostics go
to stderr. Exit codes: 0 ok, 2 bad input, 3 invalid certificate, witness or
failed check, 4 malformed file, 5 stuck strategy or exhausted budget.

Classes:
    CLI: Runs one parsed command against a RunConfig.

Functions:
    build_parser: The argparse parser.
    main: The entry point of the ``coarsedecomp`` script.
"""

import argparse
import json
import logging
import sys
import time

from .asdim import asdim_decomposition
from .config import (
    BALL_CAP, DEFAULT_SEED, ENUMERATION_CAP, ORACLE_SAMPLES, SUBDIVISION_LEVEL, RunConfig)
from .constants import derive_dimension_constants
from .decomposition import play_game, verify_certificate
from .errors import EXIT_BAD_INPUT, EXIT_INVALID, EXIT_OK, CoarseDecompError
from .geodesic import geodesic_lower, geodesic_upper
from .groups import FreeAbelian, Lamplighter, MatrixGroup, WeightedDirectSum, ball
from .lemmas import LEMMAS, RETRACTION_SAMPLES, smallest_passing_m, verify_lemma
from .matrices import length_gl, verify_nesting
from .metric import INF, diameter, format_rational, to_rational
from .norms import (
    DegreeNorm, OrderAtNorm, PAdicNorm, enumerate_ball_ba, norm_eval, norm_from_json)
from .property_a import pou_from_certificate, verify_witness
from .rings import RingSpec, parse_element, prime_factors
from .rips import build_relative_rips, build_rips, build_scaled_rips
from .serialization import (
    FIXTURES, certificate_from_json, certificate_to_json, complex_from_json, complex_to_json,
    group_spec_from_json, load_space, matrix_from_text, merge_reports, point_from_text,
    read_document, space_to_json, witness_from_json, witness_to_json, write_document)
from .strategies import (
    Coordinate, Coset, GreedyComponents, IntervalSlabs, UnipotentCosets, position_fibering,
    slab_product)
from .tree import StrategyTree, verify_tree

logger = logging.getLogger(__name__)

STRATEGIES = ("slabs", "greedy", "coset", "fibering", "unipotent")
GROUPS = ("zn", "weighted", "lamplighter", "unipotent")
NORMS = ("degree", "padic", "order_at", "eval")


def _rationals(text):
    """Reads a comma-separated list of rationals."""
    return [to_rational(part) for part in text.split(",") if part.strip()]


def _json_list(text):
    """Reads a JSON list of point ids, turning nested lists into tuples."""
    if text is None:
        return None
    return [point_from_text(json.dumps(value)) for value in json.loads(text)]


def _space_ref(ref):
    """What a derived document records for its space: fixture names stay names."""
    return ref if ref in FIXTURES else None


class CLI:
    """
    Runs one command of the coarsedecomp command line.

    Attributes:
        config (RunConfig): Settings shared by every command.
    """

    def __init__(self, config):
        """
        Initialize the CLI with the run settings.

        Args:
            config (RunConfig): Paths, seed, budgets and estimator levels.
        """
        self.config = config

    def run(self, args):
        """
        Dispatches to the handler of ``args.command`` and ``args.action``.

        Returns:
            int: The exit code.
        """
        handler = getattr(self, f"cmd_{args.command}_{args.action.replace('-', '_')}")
        start = time.perf_counter()
        document, code = handler(args)
        if self.config.timings:
            document["runtime_seconds"] = round(time.perf_counter() - start, 6)
        self.emit(document, getattr(args, "format", "json"))
        return code

    def emit(self, document, fmt="json"):
        """
        Writes a result document to ``--out`` or stdout.

        Args:
            document (dict): The result.
            fmt (str): "json", or "text" for one ``key: value`` line per field.
        """
        if fmt == "text":
            text = "".join(f"{key}: {value if isinstance(value, str) else json.dumps(value)}\n"
                           for key, value in sorted(document.items()))
            if self.config.output_path:
                with open(self.config.output_path, "w", encoding="utf-8") as file:
                    file.write(text)
            else:
                sys.stdout.write(text)
            return
        text = write_document(document, self.config.output_path)
        if not self.config.output_path:
            sys.stdout.write(text)

    # space

    def cmd_space_gen(self, args):
        """Generates a ball in one of the catalog groups."""
        radius = to_rational(args.radius)
        if radius < 0:
            raise CoarseDecompError("BAD_RADIUS", f"radius must be nonnegative, got {args.radius}")
        if args.spec:
            spec = group_spec_from_json(read_document(args.spec))
        elif args.group == "zn":
            weights = _rationals(args.weights) if args.weights else None
            spec = FreeAbelian(args.n, tuple(weights) if weights else None)
        elif args.group == "weighted":
            spec = WeightedDirectSum(cutoff=args.cutoff)
        elif args.group == "lamplighter":
            lamp = args.lamp.lower()
            spec = Lamplighter(0 if lamp == "z" else int(lamp.lstrip("z")))
        else:
            spec = self._unipotent_group(args.n, args.ring, args.degree)
        space = ball(spec, radius, cap=min(BALL_CAP, self.config.budget))
        return space_to_json(space), EXIT_OK

    @staticmethod
    def _unipotent_group(n, ring, degree):
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        values = ["1", "X"] + [f"X^{k}" for k in range(2, degree + 1)]
        sources = [f"unipotent:n={n},i={i},j={j},x={x}" for i, j in pairs for x in values]
        generators = tuple(matrix_from_text(text, ring) for text in sources)
        return MatrixGroup(generators, (DegreeNorm(),), name=f"U{n}({ring})", ring=ring,
                           sources=sources)

    def cmd_space_show(self, args):
        """Summarises a space: size, diameter and, with --full, the distance table."""
        space = load_space(args.space)
        try:
            size = diameter(space)
        except CoarseDecompError:
            size = INF
        document = {"name": space.name, "size": len(space),
                    "diameter": format_rational(size), "denominator": space.denominator}
        if args.full:
            document["space"] = space_to_json(space)
        return document, EXIT_OK

    # decompose

    def _strategy(self, space, args):
        spec = space.source[0] if space.source else None
        if args.strategy == "greedy":
            return GreedyComponents(to_rational(args.bound) if args.bound else None)
        if args.strategy == "slabs":
            sample = space.points[0] if len(space) else 0
            if isinstance(sample, tuple):
                return slab_product(len(sample))
            return IntervalSlabs(Coordinate())
        if spec is None:
            raise CoarseDecompError("BAD_STRATEGY",
                                    f"strategy '{args.strategy}' needs a group ball")
        if args.strategy == "coset":
            return Coset(spec)
        if args.strategy == "fibering":
            if not isinstance(spec, Lamplighter):
                raise CoarseDecompError("BAD_STRATEGY", "fibering needs a lamplighter ball")
            return position_fibering(space, spec)
        if not isinstance(spec, MatrixGroup):
            raise CoarseDecompError("BAD_STRATEGY", "unipotent cosets need a matrix group ball")
        theta = RingSpec.parse(spec.ring).variable(0)
        return UnipotentCosets(theta, spec.norms[0])

    def cmd_decompose_run(self, args):
        """Plays the game on a space and writes the certificate."""
        space = load_space(args.space)
        strategy = self._strategy(space, args)
        cert = play_game(space.whole(), strategy, _rationals(args.challenges))
        return certificate_to_json(cert, _space_ref(args.space)), EXIT_OK

    def cmd_decompose_verify(self, args):
        """Verifies a certificate; exit 3 if any condition fails."""
        cert = certificate_from_json(read_document(args.cert))
        report = verify_certificate(cert)
        return report.to_json(), EXIT_OK if report.valid else EXIT_INVALID

    def cmd_decompose_tree(self, args):
        """Merges certificates over one space into a strategy tree and re-checks it."""
        documents = [read_document(path) for path in args.certs]
        first = certificate_from_json(documents[0])
        certs = [first] + [certificate_from_json(d, ambient=first.ambient) for d in documents[1:]]
        tree = StrategyTree.from_certificates(certs)
        report = verify_tree(tree)
        document = report.to_json()
        document["rank"] = report.depth
        document["tree"] = tree.render()
        return document, EXIT_OK if report.valid else EXIT_INVALID

    def cmd_decompose_asdim(self, args):
        """Searches for a (d, r)-decomposition; exit 3 when none is found."""
        space = load_space(args.space)
        result = asdim_decomposition(space, args.d, args.r, args.bound, budget=self.config.budget)
        return result.to_json(), EXIT_OK if result.success else EXIT_INVALID

    # norms

    @staticmethod
    def _norm(args, ring):
        text = args.norm
        if text.lstrip().startswith("{"):
            return norm_from_json(json.loads(text), ring)
        data = {"type": text}
        if text == "padic":
            data["p"] = args.p
        elif text == "order_at":
            data["q"] = args.q
        elif text == "eval":
            data["t"] = args.t
        return norm_from_json(data, ring)

    def cmd_norms_len(self, args):
        """The length of a matrix under one norm."""
        ring = RingSpec.parse(args.ring)
        g = matrix_from_text(args.matrix, ring)
        length = length_gl(self._norm(args, ring), g, tolerance=self.config.tolerance)
        if hasattr(length, "lo"):
            return {"length": {"lo": format_rational(length.lo), "hi": format_rational(length.hi)},
                    "matrix": args.matrix}, EXIT_OK
        return {"length": format_rational(length), "matrix": args.matrix}, EXIT_OK

    def cmd_norms_ball(self, args):
        """Enumerates B_A(k, s); the default norms bound the ring's coefficients."""
        ring = RingSpec.parse(args.ring)
        if args.norm:
            norms = [self._norm(args, ring)]
        elif ring.kind == "localized":
            norms = [PAdicNorm(p) for p in prime_factors(ring.inverted)]
        elif ring.kind == "laurent":
            norms = [DegreeNorm(), OrderAtNorm(ring.variable(0))]
        else:
            norms = [DegreeNorm()]
        archimedean = []
        if args.s is not None and ring.kind == "localized":
            archimedean = [norm_from_json({"type": "eval", "t": "0"}, ring)]
        elements = enumerate_ball_ba(ring, norms, args.k, archimedean=archimedean, s=args.s,
                                     budget=self.config.budget)
        return {"ring": args.ring, "k": format_rational(to_rational(args.k)),
                "count": len(elements), "elements": [str(e) for e in elements]}, EXIT_OK

    def cmd_norms_eval(self, args):
        """Evaluates a norm on one ring element."""
        ring = RingSpec.parse(args.ring)
        value = norm_eval(self._norm(args, ring), parse_element(args.element, ring))
        return {"element": args.element, "value": str(value), "kind": value.kind,
                "exponent": value.exponent}, EXIT_OK

    def cmd_norms_nesting(self, args):
        """Checks the U_k nesting for all unipotent matrices up to a degree."""
        report = verify_nesting(args.n, args.max_degree, q=args.q_field)
        document = {"n": report.n, "max_degree": report.max_degree, "checked": report.checked,
                    "holds": report.holds, "violations": [str(v) for v in report.violations]}
        return document, EXIT_OK if report.holds else EXIT_INVALID

    # rips

    def _complex(self, args, space=None):
        if getattr(args, "complex", None):
            return complex_from_json(read_document(args.complex))
        space = space or load_space(args.space)
        marked = _json_list(args.marked) or []
        if args.kind == "relative":
            return build_relative_rips(space, marked, args.a, args.b or args.a)
        if args.kind == "scaled":
            return build_scaled_rips(space, marked, args.a, args.b or args.a, args.m)
        return build_rips(space, args.d if args.d is not None else args.a)

    def cmd_rips_build(self, args):
        """Builds a Rips, relative or scaled complex."""
        complex_ = self._complex(args)
        document = complex_to_json(complex_, _space_ref(args.space))
        document["dimension"] = complex_.dimension
        return document, EXIT_OK

    def cmd_rips_dist(self, args):
        """Upper and lower bounds on the simplicial distance between two vertices."""
        complex_ = self._complex(args)
        x, y = point_from_text(args.x), point_from_text(args.y)
        upper = geodesic_upper(complex_, x, y, self.config.subdivision)
        constants = derive_dimension_constants(complex_.dimension, self.config.samples,
                                               self.config.seed)
        lower = geodesic_lower(complex_, x, y, constants)
        return {"x": json.loads(json.dumps(x)), "y": json.loads(json.dumps(y)),
                "upper": format_rational(upper), "lower": format_rational(lower),
                "level": self.config.subdivision}, EXIT_OK

    def cmd_rips_verify(self, args):
        """Runs one lemma check; exit 3 unless it passes."""
        if args.kind is None:
            args.kind = "scaled" if args.lemma in ("scaled_comparison", "cone_retraction") else "rips"
        complex_ = self._complex(args)
        params = {"a": args.a}
        if args.eps is not None:
            params["eps"] = args.eps
        if args.C is not None:
            params["C"] = _json_list(args.C)
        if args.family is not None:
            params["family"] = [[point_from_text(json.dumps(p)) for p in member]
                                for member in json.loads(args.family)]
        if args.lemma == "cone_retraction":
            params["samples"] = args.retraction_samples
            params["seed"] = self.config.seed
        constants = derive_dimension_constants(complex_.dimension, self.config.samples,
                                               self.config.seed)
        report = verify_lemma(complex_, args.lemma, params, constants=constants,
                              level=self.config.subdivision, workers=self.config.workers)
        return report.to_json(), EXIT_OK if report.passed else EXIT_INVALID

    def cmd_rips_smallest_m(self, args):
        """Sweeps cone factors for the collapse check; exit 3 if none passes."""
        space = load_space(args.space)
        sweep = smallest_passing_m(space, _json_list(args.marked) or [], args.a,
                                   args.b or args.a, args.eps, _rationals(args.candidates),
                                   samples=args.retraction_samples, seed=self.config.seed)
        return sweep.to_json(), EXIT_OK if sweep.m is not None else EXIT_INVALID

    # pou

    def cmd_pou_build(self, args):
        """Builds an exactness witness from a certificate."""
        document = read_document(args.cert)
        cert = certificate_from_json(document)
        witness = pou_from_certificate(cert, args.R, args.eps, args.member)
        ref = document["ambient"] if isinstance(document["ambient"], str) else None
        return witness_to_json(witness, cert.initial[args.member], ref), EXIT_OK

    def cmd_pou_verify(self, args):
        """Verifies an exactness witness; exit 3 if any condition fails."""
        member, witness = witness_from_json(read_document(args.witness))
        report = verify_witness(member, witness)
        return report.to_json(), EXIT_OK if report.valid else EXIT_INVALID

    # report

    def cmd_report_merge(self, args):
        """Combines report files into one document."""
        return merge_reports(read_document(path) for path in args.reports), EXIT_OK


def _common(parser):
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="seed for every random choice")
    parser.add_argument("--budget", type=int, default=ENUMERATION_CAP,
                        help="cap on ball sizes, enumerations and searches")
    parser.add_argument("--subdivision", type=int, default=SUBDIVISION_LEVEL,
                        help="subdivision level of the geodesic estimator")
    parser.add_argument("--samples", type=int, default=ORACLE_SAMPLES,
                        help="samples per quantity for the dimension constants")
    parser.add_argument("--workers", type=int, default=1,
                        help="threads for independent verification tasks")
    parser.add_argument("--out", help="write the result here instead of stdout")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    parser.add_argument("--timings", action="store_true", help="include the runtime")
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")


def build_parser():
    """
    Builds the argument parser with one sub-parser per command and action.

    Returns:
        argparse.ArgumentParser: The parser.
    """
    parser = argparse.ArgumentParser(
        prog="coarsedecomp",
        description="Decomposition games, certificates, norms and Rips complexes "
                    "on finite metric spaces.")
    commands = parser.add_subparsers(dest="command", required=True)

    def action(command, name, help_text):
        sub = command.add_parser(name, help=help_text)
        _common(sub)
        return sub

    space = commands.add_parser("space", help="generate or inspect spaces")
    space_actions = space.add_subparsers(dest="action", required=True)
    gen = action(space_actions, "gen", "ball in a catalog group")
    gen.add_argument("--group", choices=GROUPS, default="zn")
    gen.add_argument("--spec", help="group spec JSON file, overrides --group")
    gen.add_argument("--n", type=int, default=1, help="rank, or matrix size for unipotent")
    gen.add_argument("--weights", help="comma-separated generator weights for zn")
    gen.add_argument("--cutoff", type=int, default=8, help="coordinates of the weighted sum")
    gen.add_argument("--lamp", default="z2", help="lamp group: z2, z3, ... or z")
    gen.add_argument("--ring", default="f2x", help="ring of unipotent entries")
    gen.add_argument("--degree", type=int, default=3, help="largest X power in generators")
    gen.add_argument("--radius", required=True)
    show = action(space_actions, "show", "summarise a space")
    show.add_argument("--space", required=True, help="fixture name or space file")
    show.add_argument("--full", action="store_true", help="include the distance table")

    decompose = commands.add_parser("decompose", help="play and check decomposition games")
    decompose_actions = decompose.add_subparsers(dest="action", required=True)
    run = action(decompose_actions, "run", "play the game and write a certificate")
    run.add_argument("--space", required=True)
    run.add_argument("--strategy", choices=STRATEGIES, default="slabs")
    run.add_argument("--challenges", required=True, help="comma-separated, e.g. 3,3")
    run.add_argument("--bound", help="diameter bound for the greedy strategy")
    verify = action(decompose_actions, "verify", "verify a certificate")
    verify.add_argument("cert")
    tree = action(decompose_actions, "tree", "merge certificates into a strategy tree")
    tree.add_argument("certs", nargs="+")
    asdim = action(decompose_actions, "asdim", "search a (d, r)-decomposition")
    asdim.add_argument("--space", required=True)
    asdim.add_argument("--d", type=int, required=True)
    asdim.add_argument("--r", required=True)
    asdim.add_argument("--bound", required=True)

    norms = commands.add_parser("norms", help="norms, lengths and B_A balls")
    norm_actions = norms.add_subparsers(dest="action", required=True)

    def norm_options(sub, required=True):
        sub.add_argument("--norm", required=required,
                         help=f"one of {', '.join(NORMS)} or a norm JSON object")
        sub.add_argument("--ring", default="qx")
        sub.add_argument("--p", type=int, default=2, help="prime of the p-adic norm")
        sub.add_argument("--q", default="X", help="prime polynomial of order_at")
        sub.add_argument("--t", default="0", help="evaluation point of eval")

    length = action(norm_actions, "len", "length of a matrix")
    norm_options(length)
    length.add_argument("--matrix", required=True, help='e.g. "wreath:n=1,p=X^2" or "1,X;0,1"')
    ball_action = action(norm_actions, "ball", "enumerate B_A(k, s)")
    norm_options(ball_action, required=False)
    ball_action.add_argument("--k", required=True)
    ball_action.add_argument("--s", help="bound on archimedean values")
    evaluate = action(norm_actions, "eval", "evaluate a norm")
    norm_options(evaluate)
    evaluate.add_argument("--element", required=True)
    nesting = action(norm_actions, "nesting", "check B(1, ke) c U_k c B(1, k(n-1)e)")
    nesting.add_argument("--n", type=int, default=2)
    nesting.add_argument("--max-degree", type=int, default=3)
    nesting.add_argument("--q-field", type=int, default=2, help="prime field size")

    rips = commands.add_parser("rips", help="Rips complexes and lemma checks")
    rips_actions = rips.add_subparsers(dest="action", required=True)

    def complex_options(sub, kind_default="rips"):
        sub.add_argument("--space", help="fixture name or space file")
        sub.add_argument("--complex", help="complex file written by rips build")
        sub.add_argument("--kind", choices=("rips", "relative", "scaled"), default=kind_default)
        sub.add_argument("--d", help="Rips scale, defaults to --a")
        sub.add_argument("--a", default="1")
        sub.add_argument("--b")
        sub.add_argument("--m", type=int, default=1, help="cone factor of scaled complexes")
        sub.add_argument("--marked", help="JSON list of marked points")

    rips_build = action(rips_actions, "build", "build a complex")
    complex_options(rips_build)
    rips_dist = action(rips_actions, "dist", "bound the simplicial distance")
    complex_options(rips_dist)
    rips_dist.add_argument("--x", required=True)
    rips_dist.add_argument("--y", required=True)
    rips_verify = action(rips_actions, "verify", "check one lemma")
    complex_options(rips_verify, kind_default=None)
    rips_verify.add_argument("--lemma", choices=LEMMAS, required=True)
    rips_verify.add_argument("--eps")
    rips_verify.add_argument("--C", help="JSON list of points")
    rips_verify.add_argument("--family", help="JSON list of point lists")
    rips_verify.add_argument("--retraction-samples", type=int, default=RETRACTION_SAMPLES)
    sweep = action(rips_actions, "smallest-m", "smallest cone factor passing the collapse check")
    sweep.add_argument("--space", required=True)
    sweep.add_argument("--marked", help="JSON list of W")
    sweep.add_argument("--a", default="1")
    sweep.add_argument("--b")
    sweep.add_argument("--eps", required=True)
    sweep.add_argument("--candidates", default="1,2,4,8")
    sweep.add_argument("--retraction-samples", type=int, default=RETRACTION_SAMPLES)

    pou = commands.add_parser("pou", help="partitions of unity")
    pou_actions = pou.add_subparsers(dest="action", required=True)
    pou_build = action(pou_actions, "build", "witness from a certificate")
    pou_build.add_argument("cert")
    pou_build.add_argument("--R", required=True)
    pou_build.add_argument("--eps", required=True)
    pou_build.add_argument("--member", type=int, default=0)
    pou_verify = action(pou_actions, "verify", "verify a witness")
    pou_verify.add_argument("witness")

    report = commands.add_parser("report", help="combine reports")
    report_actions = report.add_subparsers(dest="action", required=True)
    merge = action(report_actions, "merge", "merge report files")
    merge.add_argument("reports", nargs="+")
    return parser


def main(argv=None):
    """
    The main function for the coarsedecomp command line.

    Args:
        argv (list): Arguments; defaults to sys.argv[1:].

    Returns:
        int: The exit code.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    cli = CLI(RunConfig.from_args(args))
    try:
        return cli.run(args)
    except CoarseDecompError as e:
        logger.debug("%s failed", cli.config.command, exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        print(f"error: bad value: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
