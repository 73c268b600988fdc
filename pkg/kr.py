#!/usr/bin/env python3
"""
KR-theory tables, spectral sequences and acceptance checks from the command line.

Usage:
    python kr.py curve --genus 1 --real-components 0 --projective
    python kr.py curve --affine --real-components 3
    python kr.py sphere --dim 2 --mod 8 --degrees 0..8
    python kr.py ss run page.json
    python kr.py ss compare A.json B.json --N 3 --r0 2
    python kr.py gcoh module.json --degrees 0..4
    python kr.py check appendix-a
    python kr.py cache clear

Exit codes: 0 success, 1 mathematical mismatch, 2 input error.
"""

import argparse
import json
import logging
import sys

# Add lib to path
sys.path.insert(0, str(__file__).rsplit("/", 1)[0])

from lib import __version__
from lib.cache import ResultCache
from lib.commands import cache_command, render_text, run_job
from lib.config import load_config
from lib.suite import SUITES, check


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default=argparse.SUPPRESS, help="Output format")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="Seed for randomised suites")
    common.add_argument("--no-cache", action="store_true", default=argparse.SUPPRESS, help="Bypass the result cache")
    common.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS, help="Debug logging on stderr")

    parser = argparse.ArgumentParser(description="Exact KR-theory toolkit", parents=[common])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", parents=[common], help="KR of a real algebraic curve")
    p.add_argument("--genus", type=int, default=None, help="Genus g")
    p.add_argument("--real-components", type=int, required=True, help="Number λ of real components")
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--projective", dest="kind", action="store_const", const="projective")
    kind.add_argument("--affine", dest="kind", action="store_const", const="affine")
    p.set_defaults(kind="projective")
    p.add_argument("--mod", type=int, default=None, help="Also tabulate with Z/m coefficients")

    p = sub.add_parser("sphere", parents=[common], help="KO of spheres, optionally mod m")
    p.add_argument("--dim", type=int, required=True, help="Sphere dimension d")
    p.add_argument("--degrees", default="0..7", help="n range, e.g. 0..8 or 0,2,4")
    p.add_argument("--mod", type=int, default=None, help="Modulus m")

    p = sub.add_parser("ss", parents=[common], help="Spectral sequence pages")
    ss = p.add_subparsers(dest="action", required=True)
    run = ss.add_parser("run", parents=[common], help="Turn a page to E_infinity")
    run.add_argument("page", help="Page JSON file")
    cmp_ = ss.add_parser("compare", parents=[common], help="Comparison of a morphism of pages")
    cmp_.add_argument("files", nargs="+", help="Morphism JSON, or source and target page JSON")
    cmp_.add_argument("--maps", default=None, help="Component maps JSON (with two page files)")
    cmp_.add_argument("--N", dest="n_max", type=int, required=True, help="Iso in total degrees <= N")
    cmp_.add_argument("--r0", type=int, default=2, help="Page index of the morphism")

    p = sub.add_parser("gcoh", parents=[common], help="Z/2 group (hyper)cohomology")
    p.add_argument("module", help="Module or G-complex JSON file")
    p.add_argument("--degrees", default="0..4", help="Degree range")

    p = sub.add_parser("check", parents=[common], help="Run a check suite")
    p.add_argument("suite", choices=list(SUITES), help="Suite name")

    p = sub.add_parser("cache", parents=[common], help="Inspect the result cache")
    p.add_argument("action", choices=["get", "put", "clear"])
    p.add_argument("--command", dest="cached_command", default=None, help="Command name of the entry")
    p.add_argument("--params", default=None, help="Entry params as a JSON object")
    p.add_argument("--value", default=None, help="JSON file to store (put)")
    return parser


def job_of(args) -> tuple:
    """(command, params) for the computing subcommands."""
    if args.command == "curve":
        return "curve", {"genus": args.genus, "real_components": args.real_components,
                         "kind": args.kind, "mod": args.mod}
    if args.command == "sphere":
        return "sphere", {"dim": args.dim, "degrees": args.degrees, "mod": args.mod}
    if args.command == "gcoh":
        return "gcoh", {"module": args.module, "degrees": args.degrees}
    if args.action == "run":
        return "ss-run", {"page": args.page}
    params = {"n_max": args.n_max, "r0": args.r0}
    if len(args.files) == 1:
        params["morphism"] = args.files[0]
    elif len(args.files) == 2:
        params.update(source=args.files[0], target=args.files[1], maps=args.maps)
    return "ss-compare", params


def emit(result: dict, fmt: str):
    if fmt == "json":
        print(json.dumps(result, indent=2))
    elif result["success"]:
        print(render_text(result["result"]))
    else:
        print(result["error"], file=sys.stderr)


def main():
    parser = build_parser()
    args = parser.parse_args()

    if args.command == "ss" and args.action == "compare" and len(args.files) > 2:
        parser.error("ss compare takes one morphism file or two page files")

    if getattr(args, "verbose", False):
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr,
                            format="%(asctime)s %(name)s %(levelname)s %(message)s")

    config = load_config()
    fmt = getattr(args, "format", None) or config["output"]["format"]
    cache = ResultCache.from_config(config, __version__)

    if args.command == "check":
        seed = getattr(args, "seed", None)
        if seed is None:
            seed = config["check"]["seed"]
        result = check(args.suite, seed, config["check"])
    elif args.command == "cache":
        try:
            params = json.loads(args.params) if args.params else None
        except json.JSONDecodeError as e:
            parser.error(f"--params is not valid JSON: {e}")
        result = cache_command(args.action, cache, args.cached_command, params, args.value)
    else:
        command, params = job_of(args)
        use_cache = config["cache"]["enabled"] and not getattr(args, "no_cache", False)
        result = run_job(command, params, cache if use_cache else None)

    emit(result, fmt)
    sys.exit(result["exit_code"])


if __name__ == "__main__":
    main()
