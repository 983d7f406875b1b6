"""
Main entry point for linfty-lab.

    python main.py validate --manifest fixtures/fix_dgla_1.manifest.json
    python main.py theorem-a --manifest fixtures/fix_kah_2.manifest.json --text

Exit status: 0 when every check passes, 1 on a failed check, 2 on bad input.
"""

import argparse
import logging
import random
import sys
import time
from typing import Callable, Dict, List, Optional

from config.settings import settings
from linfty.deformation import (
    MCElement,
    TensorElement,
    check_annihilation,
    check_gauge_action,
    curvilinear_obstructions,
    dgla_cohomology,
    gauge_act,
    linear_cohomology_map,
    obstruction,
    primary_obstruction,
    tangent_space,
    tower_samples,
)
from linfty.dgla import DGLA, build_delta, check_coderivation, check_delta_squared, check_F_delta_zero, validate_dgla
from linfty.exceptions import LinftyError, NotMaurerCartanError
from linfty.graded import Vector
from linfty.kahler import search_hat, validate_hat, validate_kahler_identities
from linfty.report import Report, describe_vector
from linfty.scalars import scalar
from linfty.serialization import Manifest, hats_to_json, load_manifest, map_to_json, tensor_to_json
from linfty.theorem import (
    TaylorFamily,
    check_bridging_identity,
    check_proof_identities,
    check_taylor_morphism,
    corrupt_tau,
    theta_on_cohomology,
    theta_report,
)
from utils.helpers import format_report

logger = logging.getLogger("linfty-lab")

DEFAULT_TOWER = 4


def cmd_validate(manifest: Manifest, args) -> List[Report]:
    reports = []
    if manifest.dgla is not None:
        reports.append(validate_dgla(manifest.dgla))
    if manifest.package is not None:
        reports.append(manifest.package.algebra.validate())
        reports.append(validate_kahler_identities(manifest.package))
    if manifest.hats is not None:
        reports.append(validate_hat(manifest.hats, manifest.package))
    if manifest.ring is not None:
        reports.append(manifest.ring.validate())
    if not reports:
        raise LinftyError("manifest has nothing to validate")
    return reports


def cmd_delta(manifest: Manifest, args) -> List[Report]:
    manifest.require("dgla")
    delta = build_delta(manifest.dgla, args.cutoff)
    return [check_delta_squared(delta), check_coderivation(delta)]


def cmd_check_linfty(manifest: Manifest, args) -> List[Report]:
    manifest.require("dgla", "family")
    delta = build_delta(manifest.dgla, args.cutoff)
    return [check_F_delta_zero(manifest.family, delta, args.cutoff)]


def cmd_theorem_a(manifest: Manifest, args) -> List[Report]:
    manifest.require("dgla", "package")
    g, pkg = manifest.dgla, manifest.package
    reports = [validate_dgla(g), validate_kahler_identities(pkg)]
    hats = manifest.hats
    if hats is None:
        bound = manifest.hat_search if manifest.hat_search is not None else settings.SEARCH_BOUND
        result = search_hat(pkg, g, bound)
        hats = result.hats
        search = Report("hat_search")
        search.add("hat search found an assignment", hats is not None, witness=None if hats else bound)
        search.data["candidates"] = result.candidates
        search.data["truncated"] = result.truncated
        if hats is not None:
            search.data["hats"] = hats_to_json(hats)["hats"]
        reports.append(search)
        if hats is None:
            return reports
    reports.append(validate_hat(hats, pkg))
    if not all(report.passed for report in reports):
        logger.warning("validation failed; skipping the main check")
        return reports

    if manifest.corrupt_tau:
        pkg = corrupt_tau(pkg)
    main, _ = check_taylor_morphism(pkg, hats, args.cutoff)
    main.data["tau"] = map_to_json(pkg.tau)
    main.data["higher_components_vanish"] = pkg.tau.is_zero()
    reports.append(main)

    family = TaylorFamily(pkg, hats, args.cutoff)
    reports.append(check_proof_identities(family, build_delta(g, args.cutoff)))
    reports.append(check_bridging_identity(pkg, hats))
    theta = theta_on_cohomology(family)
    theta_data = Report("theta")
    theta_data.add("F_1 d = 0", theta.well_defined())
    theta_data.data["matrix"] = theta_report(theta)
    reports.append(theta_data)
    return reports


def _seeded_tensor(rng: random.Random, g: DGLA, ring, monomials, degree: int) -> TensorElement:
    names = g.space.names_of_degree(degree)
    parts = {m: Vector(g.space, {n: scalar(rng.randint(-2, 2)) for n in names}) for m in monomials}
    return TensorElement(g.space, ring, parts)


def cmd_mc(manifest: Manifest, args) -> List[Report]:
    manifest.require("dgla", "ring", "start")
    g = manifest.dgla
    reports = [manifest.ring.validate()]
    a = MCElement.of(g, manifest.start)
    report = Report("maurer_cartan")
    report.add("start is Maurer-Cartan", a.is_mc, witness=None if a.is_mc else tensor_to_json(a.residual))
    report.data["start"] = tensor_to_json(a.element)
    if manifest.gauge is not None:
        moved = gauge_act(g, manifest.gauge, a)
        report.data["gauge_image"] = tensor_to_json(moved.element)
        reports.append(check_gauge_action(g, manifest.gauge, -manifest.gauge, a))
    reports.insert(1, report)
    _, tangent = tangent_space(g)
    reports.append(tangent)
    return reports


def cmd_obstruct(manifest: Manifest, args) -> List[Report]:
    manifest.require("dgla")
    g = manifest.dgla
    rng = random.Random(args.seed)
    H = dgla_cohomology(g)
    reports = []

    if manifest.extension is not None and manifest.start is not None:
        e = manifest.extension
        report = Report(f"obstruction[{e}]")
        if manifest.start.ring != e.B:
            raise LinftyError(f"start element is over {manifest.start.ring}, extension ends at {e.B}")
        b = MCElement.of(g, manifest.start)
        try:
            record = obstruction(e, b)
        except NotMaurerCartanError as exc:
            report.add("start is Maurer-Cartan", False, witness=tensor_to_json(exc.residual))
            return [report]
        report.add("start is Maurer-Cartan", True)
        report.data["record"] = record.to_dict()
        perturbation = _seeded_tensor(rng, g, e.A, e.J, 1)
        again = obstruction(e, b, perturbation)
        report.add("class independent of the lift", again.classes == record.classes,
                   witness=None if again.classes == record.classes else tensor_to_json(perturbation))
        if g.space.names_of_degree(0):
            x = _seeded_tensor(rng, g, e.B, e.B.monomials, 0)
            moved = obstruction(e, gauge_act(g, x, b))
            report.add("class gauge invariant", moved.classes == record.classes,
                       witness=None if moved.classes == record.classes else tensor_to_json(x))
        reports.append(report)

    tower = manifest.tower or DEFAULT_TOWER
    summary = Report("obstruction_maps")
    primary = {}
    curvilinear = {}
    for name in H.space.names_of_degree(1):
        basis_class = Vector.basis_vector(H.space, name)
        primary[name] = describe_vector(primary_obstruction(g, basis_class))
        curvilinear[name] = [describe_vector(c) for c in curvilinear_obstructions(g, basis_class, tower)]
    summary.data["primary"] = primary
    summary.data["curvilinear"] = curvilinear
    reports.append(summary)

    if manifest.family is not None:
        mu11 = linear_cohomology_map(manifest.family, g)
        samples = tower_samples(g, tower)
        if manifest.extension is not None and manifest.start is not None:
            samples.append((manifest.extension, MCElement.of(g, manifest.start)))
        reports.append(check_annihilation(g, mu11, samples))
    return reports


COMMANDS: Dict[str, Callable[[Manifest, argparse.Namespace], List[Report]]] = {
    "validate": cmd_validate,
    "delta": cmd_delta,
    "check-linfty": cmd_check_linfty,
    "theorem-a": cmd_theorem_a,
    "mc": cmd_mc,
    "obstruct": cmd_obstruct,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linfty-lab",
                                     description="Exact checks for DGLAs, L-infinity morphisms and obstructions")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--manifest", required=True, help="Manifest JSON file")
    parser.add_argument("--cutoff", type=int, default=None, help="Word-length cutoff")
    parser.add_argument("--seed", type=int, default=None, help="Seed for randomized checks")
    style = parser.add_mutually_exclusive_group()
    style.add_argument("--json", dest="style", action="store_const", const="json")
    style.add_argument("--text", dest="style", action="store_const", const="text")
    parser.add_argument("--timings", action="store_true", help="Include wall-clock timings")
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns the exit status and prints the report on stdout."""
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        manifest = load_manifest(args.manifest)
        args.cutoff = args.cutoff or manifest.cutoff or settings.DEFAULT_CUTOFF
        args.seed = args.seed if args.seed is not None else (
            manifest.seed if manifest.seed is not None else settings.SEED)
        reports = COMMANDS[args.command](manifest, args)
    except LinftyError as exc:
        logger.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 2

    passed = all(report.passed for report in reports)
    for report in reports:
        failure = report.first_failure()
        if failure is not None:
            logger.warning("%s: %s failed (witness %s)", report.title, failure.name, failure.witness)
    payload = {
        "command": args.command,
        "manifest": manifest.name,
        "inputs_digest": manifest.inputs_digest,
        "cutoff": args.cutoff,
        "seed": args.seed,
        "passed": passed,
        "reports": [report.to_dict() for report in reports],
    }
    if args.timings:
        payload["timings"] = {args.command: time.perf_counter() - started}
    print(format_report(payload, args.style or settings.OUTPUT_FORMAT))
    return 0 if passed else 1


def main():
    """Configure logging and exit with the command status."""
    logging.basicConfig(level=getattr(logging, settings.LOG_LEVEL, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
