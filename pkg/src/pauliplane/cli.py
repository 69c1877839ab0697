"""Command line front end: ``verify-catalog``, ``spectrum`` and ``report``.

Exit codes are 0 when every check passes, 1 when a residual or convergence check fails and 2 for
configuration, domain and admissibility errors.
"""

# used for delayed evaluation of typing until python 3.11 becomes mainstream
from __future__ import annotations

import argparse
import csv
import datetime
import glob
import io
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sqlalchemy
import sqlalchemy.orm
import tqdm

from . import task
from .catalog import FieldParams
from .config import SCHEMA_VERSION, RunConfig, resolve
from .enums import FamilyId, ModelKind
from .failures import (ConfigError, ConvergenceFailure, DomainError, InvalidRegimeError, MissingDerivativeError,
                       ResidualDiscrepancy, SpecialFunctionError)
from .models import periodic
from .orm.base import Base, RunMetaData
from .orm.records import ResidualRecord, SpectrumRecord
from .suites import FamilyReport, SpectrumTable, periodic_spectrum, radial_spectrum, susy_spectrum, verify_family

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

USAGE_ERRORS = (ConfigError, DomainError, InvalidRegimeError, MissingDerivativeError, SpecialFunctionError)
NUMERICAL_FAILURES = (ConvergenceFailure, ResidualDiscrepancy)

BAND_POINTS = 61
BAND_WIDTH = 3.0


def _created_at() -> str:
    return datetime.datetime.now().isoformat(timespec="seconds")


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as stream:
        stream.write(text)


def _dump(document: Dict) -> str:
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def _document(command: str, config: RunConfig, body: Dict) -> Dict:
    result = {"schema": SCHEMA_VERSION, "command": command, "created_at": _created_at(), "config": config.to_json()}
    result.update(body)
    return result


def _session(url: str) -> sqlalchemy.orm.Session:
    engine = sqlalchemy.create_engine(url)
    Base.metadata.create_all(engine)
    return sqlalchemy.orm.Session(bind=engine)


def _start_run(session: sqlalchemy.orm.Session, config: RunConfig) -> RunMetaData:
    metadata = RunMetaData()
    if not metadata.committed():
        metadata.description = json.dumps(config.to_json(), sort_keys=True)
        metadata.seed = config.get("seed")
    return metadata.insert(session)


def cmd_verify_catalog(config: RunConfig) -> Tuple[int, Dict]:
    """Certify the chosen catalog entry (all twelve when none is given)."""
    task.reset_tree()
    families = [FamilyId.from_string(config["family"])] if config["family"] else list(FamilyId)
    params = FieldParams(mu=config["mu"], nu=config["nu"], k=config["k"], delta=config["delta"], c=config["c"])
    reports: List[FamilyReport] = []
    for family_id in tqdm.tqdm(families, desc="Verifying catalog", disable=config["quiet"] or len(families) == 1):
        reports.append(verify_family(family_id, params, config["samples"], config["seed"], config["tolerance"],
                                     config["probes"], mutation_controls=config["mutation_controls"]))
    passed = all(report.passed for report in reports)

    if config["database"]:
        session = _session(config["database"])
        _start_run(session, config)
        for report in reports:
            for residual in report.reports:
                residual.insert(session)
        task.check_tree.insert(session, use_progress_bar=not config["quiet"])
        session.close()

    document = _document("verify-catalog", config, {
        "families": [report.to_json() for report in reports],
        "pass": passed,
        "check_tree": task.check_tree.to_json(timestamps=False)})
    return (EXIT_PASS if passed else EXIT_FAILURE), document


def band_series(mu: float, omega: float) -> List[Tuple[float, float]]:
    """(k, E) samples of the active bands at ν = 0, plot-ready."""
    series = []
    for band in periodic.band_structure(mu, omega):
        if not band.active:
            continue
        lower, upper = band.k_range
        if np.isinf(lower):
            lower = upper - BAND_WIDTH
        if np.isinf(upper):
            upper = lower + BAND_WIDTH
        # the edges themselves are not admissible
        for k in np.linspace(lower, upper, BAND_POINTS)[1:-1]:
            series.append((float(k), float(k ** 2 + (omega - 1) * mu ** 2)))
    return sorted(series)


def run_spectrum(config: RunConfig) -> SpectrumTable:
    model = ModelKind(config["model"])
    tolerance = config["tolerance"]
    if model == ModelKind.PERIODIC:
        return periodic_spectrum(config["mu"], config["nu"], config["nmax"], config["omega"], config["cutoff"],
                                 tolerance if tolerance is not None else 1e-6)
    if model == ModelKind.RADIAL:
        return radial_spectrum(config["alpha"], config["k"], config["mu"], config["eps"], config["levels"],
                               config["rmax"], config["n"] if config["n"] is not None else 6000,
                               tolerance if tolerance is not None else 1e-4)
    return susy_spectrum(config["kappa"], config["p"], config["lambda"],
                         config["n"] if config["n"] is not None else config["nmax"],
                         tolerance if tolerance is not None else 1e-4)


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([["" if value is None else value for value in row] for row in rows])
    return buffer.getvalue()


def cmd_spectrum(config: RunConfig) -> Tuple[int, str]:
    """Closed form against numerical levels as CSV, plus the convergence log and optional band data."""
    if config["model"] is None:
        raise ConfigError("spectrum needs --model")
    task.reset_tree()
    table = run_spectrum(config)
    if config["convergence_log"]:
        _write(config["convergence_log"], "".join(json.dumps(record, sort_keys=True) + "\n"
                                                  for record in table.convergence))
    if config["bands"]:
        if table.model != ModelKind.PERIODIC:
            raise ConfigError("--bands is only available for the periodic model")
        _write(config["bands"], _csv(["k", "E"], band_series(config["mu"], config["omega"])))
    if config["json"]:
        _write(config["json"], _dump(_document("spectrum", config, {"spectrum": table.to_json(),
                                                                    "pass": table.passed})))
    return (EXIT_PASS if table.passed else EXIT_FAILURE), _csv(table.header(), table.csv_rows())


def _matrix_rows(document: Dict, source: str) -> List[Dict]:
    rows = []
    for family in document.get("families", []):
        for report in family["reports"]:
            rows.append({"family": report["family"], "subject": report["subject"], "kind": report["kind"],
                         "tolerance": report["tolerance"], "max_residual": report["max_residual"],
                         "pass": report["pass"], "source": source})
    spectrum = document.get("spectrum")
    if spectrum:
        for row in spectrum["rows"]:
            rows.append({"family": spectrum["model"], "subject": row["n_or_k"], "kind": "spectrum",
                         "tolerance": None, "max_residual": row["rel_err"], "pass": row["pass"], "source": source})
    return rows


def _store_matrix(session: sqlalchemy.orm.Session, documents: Dict[str, Dict]) -> None:
    for document in documents.values():
        for family in document.get("families", []):
            for report in family["reports"]:
                record = ResidualRecord(report["family"], report["subject"], report["kind"], report["seed"],
                                        report["n_points"], report["max_residual"], report["mean_residual"],
                                        report["tolerance"], report["pass"], report.get("printed_residual"))
                record.run_metadata_id = RunMetaData().id
                session.add(record)
        spectrum = document.get("spectrum")
        if spectrum:
            for row in spectrum["rows"]:
                record = SpectrumRecord(spectrum["model"], row["n_or_k"], row["E_closed_form"], row["E_numeric"],
                                        row["abs_err"], row["rel_err"])
                record.run_metadata_id = RunMetaData().id
                session.add(record)
    session.commit()


def cmd_report(config: RunConfig) -> Tuple[int, Dict]:
    """Merge the JSON reports of a directory into one pass/fail matrix."""
    directory = config["input"]
    if not directory or not os.path.isdir(directory):
        raise ConfigError("report needs an existing --input directory, got %s" % directory)
    paths = sorted(glob.glob(os.path.join(directory, "*.json")))
    documents = {}
    for path in paths:
        with open(path, encoding="utf-8") as stream:
            try:
                document = json.load(stream)
            except json.JSONDecodeError:
                logger.warning("Skipping %s: not a JSON document" % path)
                continue
        if document.get("schema") != SCHEMA_VERSION or document.get("command") == "report":
            logger.warning("Skipping %s: not a pauliplane run report" % path)
            continue
        documents[os.path.basename(path)] = document
    if not documents:
        raise ConfigError("No run reports found in %s" % directory)

    matrix = []
    for source, document in sorted(documents.items()):
        matrix.extend(_matrix_rows(document, source))
    matrix.sort(key=lambda row: (row["family"], row["kind"], str(row["subject"]), row["source"]))
    passed = all(row["pass"] for row in matrix)

    if config["database"]:
        session = _session(config["database"])
        _start_run(session, config)
        _store_matrix(session, documents)
        session.close()

    document = _document("report", config, {"sources": sorted(documents), "matrix": matrix, "pass": passed})
    return (EXIT_PASS if passed else EXIT_FAILURE), document


def _parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="pauliplane",
                                     description="Verify symmetries and spectra of planar Pauli Hamiltonians.")
    commands = parser.add_subparsers(dest="command", required=True)

    def common(subparser: argparse.ArgumentParser):
        subparser.add_argument("--config", help="YAML file with one section per command")
        subparser.add_argument("--output", help="Write the result here instead of stdout")
        subparser.add_argument("--quiet", action="store_const", const=True, default=None,
                               help="Disable progress bars")

    verify = commands.add_parser("verify-catalog", help="Certify catalog fields and their symmetry operators")
    common(verify)
    verify.add_argument("--family", help="Catalog id such as T2.1; all entries when omitted")
    for flag in ("--mu", "--nu", "--k", "--c", "--tolerance"):
        verify.add_argument(flag, type=float)
    for flag in ("--delta", "--samples", "--seed", "--probes"):
        verify.add_argument(flag, type=int)
    verify.add_argument("--no-mutation-controls", dest="mutation_controls", action="store_const", const=False,
                        default=None)
    verify.add_argument("--database", help="SQLAlchemy URL to store residuals and the check tree")

    spectrum = commands.add_parser("spectrum", help="Closed form spectra against numerical eigensolvers")
    common(spectrum)
    spectrum.add_argument("--model", choices=[model.value for model in ModelKind])
    for flag in ("--alpha", "--k", "--mu", "--rmax", "--nu", "--omega", "--kappa", "--p", "--tolerance"):
        spectrum.add_argument(flag, type=float)
    spectrum.add_argument("--lambda", dest="lambda", type=float)
    for flag in ("--eps", "--levels", "--n", "--nmax", "--cutoff"):
        spectrum.add_argument(flag, type=int)
    spectrum.add_argument("--convergence-log", dest="convergence_log", help="JSON lines of the convergence monitor")
    spectrum.add_argument("--bands", help="CSV of (k, E) band samples, periodic model only")
    spectrum.add_argument("--json", help="JSON summary for the report command")

    report = commands.add_parser("report", help="Merge run reports into one pass/fail matrix")
    common(report)
    report.add_argument("--input", help="Directory with JSON run reports")
    report.add_argument("--database", help="SQLAlchemy URL to store the merged results")
    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    args = _parse_args(argv)
    overrides = {key: value for key, value in vars(args).items() if key not in ("command", "config")}
    try:
        config = resolve(args.command, args.config, overrides)
        if args.command == "verify-catalog":
            code, document = cmd_verify_catalog(config)
            _write(config["output"], _dump(document))
        elif args.command == "spectrum":
            code, text = cmd_spectrum(config)
            _write(config["output"], text)
        else:
            code, document = cmd_report(config)
            _write(config["output"], _dump(document))
    except USAGE_ERRORS as e:
        sys.stderr.write("error: %s\n" % e)
        return EXIT_CONFIG
    except NUMERICAL_FAILURES as e:
        sys.stderr.write("failure: %s\n" % e)
        return EXIT_FAILURE
    return code


if __name__ == "__main__":
    raise SystemExit(main())
