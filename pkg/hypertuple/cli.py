"""
The ``hypertuple`` command line.

Every command is turned into an :class:`ExperimentConfig`, executed by
:func:`run` into a :class:`RunReport` and printed as JSON. Options are taken
from the command line, else from the ``[hypertuple]`` section of the INI
file given by ``--config``, else from the package defaults.

Exit status is 0 when every stage passed, 1 when a stage failed or a verdict
differs from ``--expect`` and 2 on errors, with a one-line JSON diagnostic
on stderr.

"""
import argparse
import configparser
import contextlib
import csv
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from hypertuple import __version__
from hypertuple.algebra import (IDEMPOTENT_TOL, close_algebra, commutant, compute_characters,
                                find_cyclic_vector, is_cyclic_vector)
from hypertuple.construct import (TupleSpec, build_tuple, default_algebra, f4_triple, gallery,
                                  gallery_names, min_nondiagonalizable_size, min_tuple_size,
                                  predicted_size, validate_tuple)
from hypertuple.errors import HypertupleError, InvalidInput, SchemaError, jsonable
from hypertuple.expmap import (AUTO, KERNEL_TOL, MEMBERSHIP_TOL, REAL_TRUNCATION_TOL,
                               ROUNDTRIP_TOL, BranchCut, alg_exp, alg_log, alg_sqrt,
                               has_exp_preimage, ker_exp_generators, sign_decomposition, sign_group)
from hypertuple.fingerprint import PHASH, SHA256, fingerprint_factory
from hypertuple.numkit import (DEFAULT_SEED, DEFAULT_TOLERANCE, SCHEMA_VERSION, FieldTag, Matrix,
                               Tolerance, check_schema_version, max_norm, vector_to_json)
from hypertuple.orbit import (DEFAULT_COMMUTANT_SAMPLES, DEFAULT_DENSE_THRESHOLD, DEFAULT_GRID,
                              DEFAULT_MAX_DEGREE, DEFAULT_MAX_POINTS, DEFAULT_PLATEAU_EPS,
                              DEFAULT_SPARSE_THRESHOLD, Box, OrbitBudget, VerdictThresholds,
                              coverage, default_checkpoints, enumerate_semigroup, f4_closed_form,
                              halfplane_check, orbit_shells, verify_non_cyclic_commutant,
                              verify_tuple)
from hypertuple.semigroup import (AlphaScheme, completing_generator, independent_reals,
                                  kronecker_approx, parse_alpha)
from hypertuple.summary.html import generate_summary_basic_html, generate_summary_html

SUPPORTED_FORMATS = {"html", "json", "basic-html"}

#: Section of the ``--config`` INI file holding defaults.
INI_SECTION = "hypertuple"

#: Where ``--summary`` files go unless ``--results-path`` says otherwise.
DEFAULT_RESULTS_PATH = "hypertuple-results"

#: The default ``--alpha`` scheme.
DEFAULT_ALPHA = AlphaScheme.SQRT_PRIMES.value

#: Default Kronecker acceptance and scan length.
DEFAULT_KRONECKER_EPS = 1e-2
DEFAULT_KRONECKER_M0_MAX = 10 ** 4

#: Largest dimension tabulated by the suite command.
DEFAULT_SUITE_MAX_N = 5

#: Degree of the F4 half-plane and closed-form checks.
F4_CHECK_DEGREE = 60

#: Budget and grid of the F4 coverage runs; the degree bounds the run, not the points.
F4_COVERAGE_BUDGET = OrbitBudget(max_degree=400, max_points=10 ** 7)
F4_COVERAGE_GRID = 20

#: Relative agreement required between the F4 closed form and matrix products.
F4_CLOSED_FORM_TOL = 1e-8

#: Coverage maps with more cells than this are not fingerprinted.
MAX_FINGERPRINT_CELLS = 2 ** 24

#: Name of the JSON run report inside ``--results-path``.
REPORT_FILE = "results.json"

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_ERROR = 2

#: Options shared by every command; everything else is command specific.
GLOBAL_OPTIONS = frozenset({
    "command", "seed", "tol", "json_out", "csv_out", "expect", "config", "summary",
    "results_path", "verbose", "alpha", "max_degree", "max_points", "grid",
    "dense_threshold", "sparse_threshold", "plateau_eps",
})

__all__ = ["COMMANDS", "ExperimentConfig", "RunReport", "build_parser", "load_config",
           "load_tuple", "main", "run"]

logger = logging.getLogger(__name__)


#
# Configuration
#


def _integer(name, value):
    try:
        if isinstance(value, float) and not value.is_integer():
            raise ValueError
        return int(value)
    except (TypeError, ValueError):
        raise InvalidInput(f"{name} must be an integer", **{name: value})


def _number(name, value):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise InvalidInput(f"{name} must be a number", **{name: value})


def _summary_formats(value):
    if not value:
        return ()
    formats = {item.strip().lower() for item in str(value).split(",") if item.strip()}
    unsupported = formats - SUPPORTED_FORMATS
    if unsupported:
        raise InvalidInput(f"The summary type(s) '{sorted(unsupported)}' are not supported.",
                           supported=sorted(SUPPORTED_FORMATS))
    return tuple(sorted(formats))


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything a run depends on; identical configs give identical reports.

    The seed is always explicit: its default is :data:`DEFAULT_SEED`, never
    fresh entropy.

    """

    command: str
    seed: int = DEFAULT_SEED
    tolerance: Tolerance = DEFAULT_TOLERANCE
    budget: OrbitBudget = OrbitBudget()
    grid: int = DEFAULT_GRID
    thresholds: VerdictThresholds = VerdictThresholds()
    alpha: str = DEFAULT_ALPHA
    options: dict = field(default_factory=dict)
    expect: Optional[str] = None
    json_out: Optional[str] = None
    csv_out: Optional[str] = None
    summary: Tuple[str, ...] = ()
    results_path: str = DEFAULT_RESULTS_PATH

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidInput(f"unknown command {self.command!r}", known=sorted(COMMANDS))
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise InvalidInput("seed must be a non-negative integer", seed=self.seed)
        object.__setattr__(self, "summary", _summary_formats(",".join(self.summary)))
        object.__setattr__(self, "options", jsonable(dict(self.options)))

    def to_json(self):
        return dict(
            schema_version=SCHEMA_VERSION,
            command=self.command,
            seed=self.seed,
            tolerance=self.tolerance.to_json(),
            budget=self.budget.to_json(),
            grid=self.grid,
            thresholds=self.thresholds.to_json(),
            alpha=self.alpha,
            options=dict(self.options),
            expect=self.expect,
            outputs=dict(json_out=self.json_out, csv_out=self.csv_out,
                         summary=list(self.summary), results_path=self.results_path),
        )

    @classmethod
    def from_json(cls, data, path="$"):
        """
        Parse a config echo; ``command`` and ``seed`` are mandatory.

        """
        check_schema_version(data, path)
        for key in ("command", "seed"):
            if key not in data:
                raise SchemaError(f"missing key {key!r}", path=path)
        seed = data["seed"]
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise SchemaError("seed must be an integer", path=f"{path}.seed")
        sections = {}
        for key in ("tolerance", "budget", "thresholds", "options", "outputs"):
            value = data.get(key, {})
            if not isinstance(value, dict):
                raise SchemaError(f"{key} must be an object", path=f"{path}.{key}")
            sections[key] = value
        thresholds = sections["thresholds"]
        outputs = sections["outputs"]
        try:
            return cls(
                command=data["command"],
                seed=seed,
                tolerance=Tolerance(**sections["tolerance"]),
                budget=OrbitBudget(**sections["budget"]),
                grid=data.get("grid", DEFAULT_GRID),
                thresholds=VerdictThresholds(
                    thresholds.get("dense_threshold", DEFAULT_DENSE_THRESHOLD),
                    thresholds.get("sparse_threshold", DEFAULT_SPARSE_THRESHOLD),
                    thresholds.get("plateau_eps", DEFAULT_PLATEAU_EPS)),
                alpha=data.get("alpha", DEFAULT_ALPHA),
                options=sections["options"],
                expect=data.get("expect"),
                json_out=outputs.get("json_out"),
                csv_out=outputs.get("csv_out"),
                summary=tuple(outputs.get("summary", ())),
                results_path=outputs.get("results_path", DEFAULT_RESULTS_PATH),
            )
        except SchemaError:
            raise
        except (InvalidInput, TypeError) as error:
            raise SchemaError(str(error), path=path)


def _read_ini(path):
    if path is None:
        return {}
    parser = configparser.ConfigParser()
    with open(path) as handle:
        parser.read_file(handle)
    if not parser.has_section(INI_SECTION):
        logger.debug(f"{path} has no [{INI_SECTION}] section")
        return {}
    return dict(parser.items(INI_SECTION))


def load_config(args):
    """
    Build the :class:`ExperimentConfig` of parsed command line arguments.

    """
    ini = _read_ini(getattr(args, "config", None))

    def get_cli_or_ini(name, default=None):
        value = getattr(args, name.replace("-", "_"), None)
        if value is None:
            value = ini.get(name)
        return default if value is None else value

    budget = OrbitBudget(
        _integer("max-degree", get_cli_or_ini("max-degree", DEFAULT_MAX_DEGREE)),
        _integer("max-points", get_cli_or_ini("max-points", DEFAULT_MAX_POINTS)),
    )
    thresholds = VerdictThresholds(
        _number("dense-threshold", get_cli_or_ini("dense-threshold", DEFAULT_DENSE_THRESHOLD)),
        _number("sparse-threshold", get_cli_or_ini("sparse-threshold", DEFAULT_SPARSE_THRESHOLD)),
        _number("plateau-eps", get_cli_or_ini("plateau-eps", DEFAULT_PLATEAU_EPS)),
    )
    options = {key: value for key, value in vars(args).items()
               if key not in GLOBAL_OPTIONS and value is not None}
    return ExperimentConfig(
        command=args.command,
        seed=_integer("seed", get_cli_or_ini("seed", DEFAULT_SEED)),
        tolerance=Tolerance.parse(get_cli_or_ini("tol")),
        budget=budget,
        grid=_integer("grid", get_cli_or_ini("grid", DEFAULT_GRID)),
        thresholds=thresholds,
        alpha=str(get_cli_or_ini("alpha", DEFAULT_ALPHA)),
        options=options,
        expect=getattr(args, "expect", None),
        json_out=getattr(args, "json_out", None),
        csv_out=getattr(args, "csv_out", None),
        summary=_summary_formats(get_cli_or_ini("summary")),
        results_path=str(get_cli_or_ini("results-path", DEFAULT_RESULTS_PATH)),
    )


#
# Reports
#


def residual(value, tolerance, lower=False):
    """
    A numeric claim with the tolerance it was tested against.

    With ``lower`` the value must exceed the tolerance instead.

    """
    value = float(value)
    ok = value > tolerance if lower else value <= tolerance
    return dict(value=value, tolerance=float(tolerance), ok=bool(ok))


def parse_expect(text):
    """
    Parse ``VERDICT`` or ``stage=VERDICT,...``; a bare verdict applies to
    the first stage of the run.

    """
    expectations = {}
    for item in str(text).split(","):
        if not item.strip():
            continue
        stage, sep, verdict = item.rpartition("=")
        expectations[stage.strip() if sep else None] = verdict.strip()
    if not expectations:
        raise InvalidInput("--expect needs at least one verdict", expect=text)
    return expectations


@dataclass(eq=False)
class RunReport:
    """
    Per-stage results of one run.

    Each stage records a status, a verdict, the optional expected verdict,
    residuals as ``{value, tolerance, ok}`` and a free-form result.

    """

    config: ExperimentConfig
    stages: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @contextlib.contextmanager
    def stage(self, name):
        """Attribute errors raised inside the block to stage ``name``."""
        try:
            yield
        except HypertupleError as error:
            error.details.setdefault("run_stage", name)
            raise

    def add(self, name, result=None, verdict=None, expected=None, residuals=None,
            status_msg="", **extra):
        residuals = dict(residuals or {})
        messages = [status_msg] if status_msg else []
        status = "passed"
        failing = sorted(key for key, value in residuals.items() if not value["ok"])
        if failing:
            status = "failed"
            messages.append(f"Residuals outside tolerance: {', '.join(failing)}.")
        if expected is not None and verdict != expected:
            status = "failed"
            messages.append(f"Verdict {verdict} differs from expected {expected}.")
        stage = dict(status=status, status_msg=" ".join(messages), verdict=verdict,
                     expected=expected, residuals=residuals, result=result or {})
        stage.update(extra)
        self.stages[name] = jsonable(stage)
        logger.info(f"{name}: {verdict} ({status})")
        return self.stages[name]

    @property
    def primary(self):
        return next(iter(self.stages), None)

    @property
    def verdicts(self):
        return {name: stage["verdict"] for name, stage in self.stages.items()}

    @property
    def status(self):
        if any(stage["status"] == "failed" for stage in self.stages.values()):
            return "failed"
        return "passed"

    def expect(self, text):
        """Compare verdicts with ``--expect``, failing the stages that differ."""
        for name, verdict in parse_expect(text).items():
            name = self.primary if name is None else name
            if name not in self.stages:
                raise InvalidInput(f"no stage named {name!r}", stages=list(self.stages))
            stage = self.stages[name]
            stage["expected"] = verdict
            if stage["verdict"] != verdict:
                stage["status"] = "failed"
                message = f"Verdict {stage['verdict']} differs from expected {verdict}."
                stage["status_msg"] = f"{stage['status_msg']} {message}".strip()

    def to_json(self):
        data = dict(
            schema_version=SCHEMA_VERSION,
            command=self.config.command,
            config=self.config.to_json(),
            stages=jsonable(self.stages),
            verdicts=self.verdicts,
            status=self.status,
        )
        data["digest"] = fingerprint_factory[SHA256]().of(data)
        data["generator"] = f"hypertuple {__version__}"
        data["wall_time"] = self.wall_time
        return data

    @classmethod
    def from_json(cls, data, path="$"):
        """
        Parse a report, checking its schema version and digest.

        """
        check_schema_version(data, path)
        if "config" not in data:
            raise SchemaError("missing key 'config'", path=path)
        config = ExperimentConfig.from_json(data["config"], f"{path}.config")
        stages = data.get("stages", {})
        if not isinstance(stages, dict):
            raise SchemaError("stages must be an object", path=f"{path}.stages")
        for name, stage in stages.items():
            if not isinstance(stage, dict) or "status" not in stage:
                raise SchemaError("stage must be an object with a status",
                                  path=f"{path}.stages[{name!r}]")
        wall_time = data.get("wall_time", 0.0)
        if isinstance(wall_time, bool) or not isinstance(wall_time, (int, float)):
            raise SchemaError("wall_time must be a number", path=f"{path}.wall_time")
        report = cls(config, dict(stages), float(wall_time))
        digest = data.get("digest")
        if digest is not None and digest != report.to_json()["digest"]:
            raise SchemaError("digest does not match the report content", path=f"{path}.digest")
        return report


def _fingerprint(report):
    """Perceptual hash of a coverage map, or None when the map is too large."""
    if report.cells > MAX_FINGERPRINT_CELLS:
        return None
    return fingerprint_factory[PHASH]().of(report)


def _add_coverage(report, name, cov, result=None, expected=None, status_msg=""):
    result = dict(result or {}, coverage=cov.to_json())
    return report.add(name, result, verdict=cov.verdict.value, expected=expected,
                      status_msg=status_msg, coverage=list(cov.coverage),
                      digest=_fingerprint(cov))


#
# Inputs
#


def _load_json(text, what):
    """Inline JSON (starting with ``{`` or ``[``) or the path of a JSON file."""
    stripped = str(text).lstrip()
    if stripped.startswith(("{", "[")):
        source = stripped
    else:
        with open(text) as handle:
            source = handle.read()
    try:
        return json.loads(source)
    except json.JSONDecodeError as error:
        raise SchemaError(f"{what} is not valid JSON: {error.msg}", line=error.lineno,
                          column=error.colno)


def load_tuple(path):
    """
    Read a tuple: a tuple JSON object, a bare list of matrices, or a run
    report holding a constructed tuple.

    """
    data = _load_json(path, "tuple")
    if isinstance(data, dict) and "stages" in data:
        check_schema_version(data)
        if not isinstance(data["stages"], dict):
            raise SchemaError("stages must be an object", path="$.stages")
        for name, stage in data["stages"].items():
            result = stage.get("result") if isinstance(stage, dict) else None
            if isinstance(result, dict) and "tuple" in result:
                return TupleSpec.from_json(result["tuple"], f"$.stages[{name!r}].result.tuple")
        raise SchemaError("report holds no tuple", path="$.stages")
    return TupleSpec.from_json(data)


def _parse_numbers(text, what, real=False):
    try:
        values = [complex(item.strip().replace(" ", "")) for item in str(text).split(",")]
    except ValueError:
        raise InvalidInput(f"malformed {what} {text!r}")
    values = np.array(values, dtype=np.complex128)
    if real:
        if np.any(values.imag):
            raise InvalidInput(f"{what} must be real", value=text)
        return values.real
    return values


def _alpha_setting(text, d=None):
    """
    Scheme and user values of an ``--alpha`` setting.

    ``sqrt-primes:<d>`` and ``log-primes:<d>`` must ask for exactly ``d``
    values; without ``d`` (tuple commands size alpha from the tuple) the
    count suffix is refused.

    """
    scheme, sep, _ = str(text).partition(":")
    scheme = AlphaScheme.parse(scheme)
    if scheme is AlphaScheme.USER:
        alpha = parse_alpha(text)
        return alpha.scheme, alpha.values
    if sep:
        count = parse_alpha(text).d
        if d is None:
            raise InvalidInput("--alpha takes a value count only with kronecker", alpha=text)
        if count != d:
            raise InvalidInput(f"--alpha asks for {count} values but the target has {d}",
                               alpha=text, d=d)
    return scheme, None


def _algebra_source(config):
    """
    The algebra named by ``--tuple``, ``--algebra`` or ``--field``/``--dim``.

    Returns
    -------
    name : str
    alg : CommutativeAlgebra
    entry : GalleryEntry or None

    """
    opts = config.options
    if "tuple" in opts:
        spec = load_tuple(opts["tuple"])
        return spec.provenance.algebra_id, close_algebra(spec.operators, config.tolerance), None
    if "algebra" in opts:
        entry = gallery(opts["algebra"], opts.get("field"), opts.get("dim"), opts.get("m"),
                        config.tolerance)
    elif "dim" in opts:
        entry = default_algebra(opts.get("field", "C"), opts["dim"])
    else:
        raise InvalidInput("one of --tuple, --algebra or --dim is required")
    return entry.name, entry.algebra, entry


def _tuple_source(config):
    """
    The tuple given by ``--tuple``, or the one constructed on the algebra
    selected by ``--algebra`` or ``--field``/``--dim``.

    """
    opts = config.options
    if "tuple" in opts:
        return load_tuple(opts["tuple"])
    scheme, values = _alpha_setting(config.alpha)
    if opts.get("algebra") == "f4":
        params = _parse_numbers(opts["f4"], "f4 parameters", real=True) if "f4" in opts else ()
        if len(params) not in (0, 4):
            raise InvalidInput("--f4 needs a1,b1,a2,b2", f4=opts["f4"])
        return f4_triple(*params, alpha_scheme=scheme, tol=config.tolerance,
                         alpha_values=values)
    name, alg, _ = _algebra_source(config)
    return build_tuple(alg, None, scheme, config.seed, config.tolerance, values, name)


def _start_vector(config, spec, required=True):
    text = config.options.get("x")
    if text is None:
        if not required:
            return None
        alg = close_algebra(spec.operators, config.tolerance)
        x = find_cyclic_vector(alg, seed=config.seed, tol=config.tolerance)
        x = np.ones(spec.n) if x is None else x
        return np.real(x) if spec.field is FieldTag.REAL else x
    x = _parse_numbers(text, "starting vector", real=spec.field is FieldTag.REAL)
    if x.shape != (spec.n,):
        raise InvalidInput("starting vector does not match the tuple dimension", n=spec.n,
                           size=x.size)
    return x


def _box(config, field_, n):
    text = config.options.get("box")
    return Box.cube(field_, n) if text is None else Box.parse(text, field_, n)


def _checkpoints(config, max_degree=None):
    text = config.options.get("checkpoints")
    if text is None:
        return default_checkpoints(config.budget.max_degree if max_degree is None else max_degree)
    return [_integer("checkpoints", v) for v in str(text).split(",") if v.strip()]


def _with_csv(shells, writer, box):
    """Write every point of the shells as a CSV row while passing them on."""
    for shell in shells:
        if len(shell):
            coords = box.coordinates(shell.points).tolist()
            writer.writerows(q + c for q, c in zip(shell.exponents.tolist(), coords))
        yield shell


#
# Commands
#


def _validation_stage(report, name, spec, config, alg=None):
    validation = validate_tuple(spec, config.tolerance, alg)
    residuals = dict(
        max_commutator=residual(validation.max_commutator, validation.tolerance),
        min_singular_value=residual(validation.min_singular_value, config.tolerance.rank_tol,
                                    lower=True),
    )
    if validation.membership_residual is not None:
        residuals["membership_residual"] = residual(validation.membership_residual,
                                                    MEMBERSHIP_TOL)
    report.add(name, validation.to_json(), verdict="VALID" if validation.ok else "INVALID",
               expected="VALID", residuals=residuals)


def _character_result(alg, table, config):
    cyclic = find_cyclic_vector(alg, seed=config.seed, tol=config.tolerance)
    result = dict(field=alg.field.value, n=alg.n, dim=alg.dim, cyclic=cyclic is not None,
                  cyclic_vector=None if cyclic is None else vector_to_json(cyclic),
                  uniqueness_gap=table.uniqueness_gap, characters=table.to_json(),
                  minimal_size=min_tuple_size(alg.field, alg.n))
    result.update(table.counts())
    if cyclic is not None and alg.dim == alg.n:
        result["predicted_size"] = predicted_size(alg.field, alg.n, table)
    residuals = dict(idempotent_residual=residual(table.residual, IDEMPOTENT_TOL))
    return result, residuals


def _cmd_analyze(config, report):
    with report.stage("analyze"):
        name, alg, entry = _algebra_source(config)
        table = compute_characters(alg, config.tolerance, config.seed)
        result, residuals = _character_result(alg, table, config)
        result["algebra"] = name
        result["commutant_dim"] = len(commutant(alg, config.tolerance))
        report.add("analyze", result, verdict="CYCLIC" if result["cyclic"] else "NOT_CYCLIC",
                   residuals=residuals)
        if entry is not None:
            counts = entry.expected.counts()
            match = all(result.get(key) == value for key, value in counts.items())
            report.add("analyze.expected", dict(expected=counts),
                       verdict="MATCH" if match else "MISMATCH", expected="MATCH")


def _cmd_construct(config, report):
    with report.stage("construct"):
        spec = _tuple_source(config)
        alg = close_algebra(spec.operators, config.tolerance)
        result = dict(algebra=spec.provenance.algebra_id, size=len(spec),
                      predicted_size=spec.predicted_size,
                      minimal_size=min_tuple_size(spec.field, spec.n), tuple=spec.to_json())
        expected = None if spec.predicted_size is None else str(spec.predicted_size)
        report.add("construct", result, verdict=str(len(spec)), expected=expected)
        _validation_stage(report, "construct.validation", spec, config, alg)


def _cmd_min_size(config, report):
    opts = config.options
    if "dim" not in opts:
        raise InvalidInput("min-size needs --dim")
    field_ = FieldTag.parse(opts.get("field", "C"))
    with report.stage("min-size"):
        size = min_tuple_size(field_, opts["dim"])
        result = dict(field=field_.value, n=opts["dim"], min_size=size)
        if field_ is FieldTag.COMPLEX and opts["dim"] >= 2:
            result["min_nondiagonalizable_size"] = min_nondiagonalizable_size(opts["dim"])
        report.add("min-size", result, verdict=str(size))


def _gallery_counts(entry, config):
    table = compute_characters(entry.algebra, config.tolerance, config.seed)
    counts = table.counts()
    expected = entry.expected.counts()
    return table, counts, expected, counts == expected


def _cmd_gallery(config, report):
    opts = config.options
    if opts["action"] == "list":
        algebras = []
        for name in gallery_names():
            entry = gallery(name, tol=config.tolerance)
            algebras.append(dict(entry.to_json(), notes=entry.expected.notes))
        report.add("gallery", dict(algebras=algebras), verdict=str(len(algebras)))
        return
    if "name" not in opts:
        raise InvalidInput("gallery show needs an algebra name", known=gallery_names())
    with report.stage("gallery"):
        entry = gallery(opts["name"], opts.get("field"), opts.get("dim"), opts.get("m"),
                        config.tolerance)
        table, counts, expected, match = _gallery_counts(entry, config)
        result, residuals = _character_result(entry.algebra, table, config)
        result.update(entry.to_json())
        if entry.cyclic_vector is not None:
            result["listed_vector_cyclic"] = bool(
                is_cyclic_vector(entry.algebra, entry.cyclic_vector, config.tolerance))
        report.add("gallery", result, verdict="MATCH" if match else "MISMATCH",
                   expected="MATCH", residuals=residuals)


def _cmd_orbit(config, report):
    with report.stage("orbit"):
        spec = _tuple_source(config)
        x = _start_vector(config, spec)
        box = _box(config, spec.field, spec.n)
        shells = orbit_shells(spec, x, config.budget)
        marks = _checkpoints(config)
        if config.csv_out:
            with open(config.csv_out, "w", newline="") as handle:
                writer = csv.writer(handle)
                header = [f"k{j + 1}" for j in range(len(spec))]
                writer.writerow(header + [f"coord{i + 1}" for i in range(box.dim)])
                cov = coverage(_with_csv(shells, writer, box), box, config.grid, marks,
                               config.thresholds)
            logger.info(f"Orbit points written to {config.csv_out}")
        else:
            cov = coverage(shells, box, config.grid, marks, config.thresholds)
        result = dict(algebra=spec.provenance.algebra_id, tuple_size=len(spec),
                      x=vector_to_json(x), budget=config.budget.to_json())
        _add_coverage(report, "orbit", cov, result)


def _cmd_verify(config, report):
    opts = config.options
    with report.stage("verify"):
        spec = _tuple_source(config)
        x = _start_vector(config, spec, required=False)
        box = _box(config, spec.field, spec.n)
        verified = verify_tuple(spec, x, config.budget, box, config.grid, opts.get("drop"),
                                _checkpoints(config), config.thresholds, config.tolerance,
                                config.seed)
        data = verified.to_json()
        alg = close_algebra(spec.operators, config.tolerance)
        _validation_stage(report, "verify.validation", spec, config, alg)
        result = {key: data[key] for key in ("algebra", "tuple_size", "predicted_size",
                                               "minimal_size", "x")}
        _add_coverage(report, "verify.coverage", verified.coverage, result)
        if verified.dropped is not None:
            message = f"Tuple without operator {verified.dropped}, doubled budget."
            full = _fingerprint(verified.coverage)
            dropped = _fingerprint(verified.dropped_coverage)
            match = None
            if full is not None and dropped is not None:
                match = fingerprint_factory[PHASH]().match(dropped, full)
                message = f"{message} {match.status_msg()}".strip()
            gap = verified.coverage.final - verified.dropped_coverage.final
            stage = _add_coverage(report, "verify.dropped", verified.dropped_coverage,
                                  dict(dropped=verified.dropped, coverage_gap=gap),
                                  status_msg=message)
            if match is not None:
                stage.update(match.to_json())


def _cmd_kronecker(config, report):
    opts = config.options
    if "target" not in opts:
        raise InvalidInput("kronecker needs --target")
    with report.stage("kronecker"):
        target = _parse_numbers(opts["target"], "target", real=True)
        scheme, values = _alpha_setting(config.alpha, len(target))
        alpha = independent_reals(len(target), scheme, values)
        eps = opts.get("eps", DEFAULT_KRONECKER_EPS)
        m0_max = opts.get("m0_max", DEFAULT_KRONECKER_M0_MAX)
        solution = kronecker_approx(alpha, target, eps, m0_max)
        residuals = dict(error=residual(solution.error, eps)) if solution.found else {}
        report.add("kronecker", dict(alpha=alpha.to_json(), target=target, eps=eps,
                                     m0_max=m0_max, solution=solution.to_json()),
                   verdict="FOUND" if solution.found else "NOT_FOUND", residuals=residuals)
        if opts.get("semigroup"):
            basis = np.eye(alpha.d)
            x0 = completing_generator(basis, alpha, config.tolerance)
            box = _box(config, FieldTag.REAL, alpha.d)
            shells = enumerate_semigroup([x0, *basis], config.budget)
            cov = coverage(shells, box, config.grid, _checkpoints(config), config.thresholds)
            _add_coverage(report, "kronecker.semigroup", cov, dict(x0=x0))


def _element(config, alg):
    opts = config.options
    if "element" in opts:
        return Matrix.from_json(_load_json(opts["element"], "element"))
    if "coeffs" in opts:
        coeffs = _parse_numbers(opts["coeffs"], "coefficients")
        if not np.any(coeffs.imag):
            coeffs = coeffs.real
        return alg.element(coeffs)
    raise InvalidInput("this operation needs --element or --coeffs", op=opts["op"])


def _relative(error, reference):
    return float(error) / max(1.0, max_norm(reference))


def _cmd_expmap(config, report):
    opts = config.options
    op = opts["op"]
    tol = config.tolerance
    with report.stage("expmap"):
        name, alg, _ = _algebra_source(config)
        table = compute_characters(alg, tol, config.seed)
        result = dict(algebra=name, op=op)
        residuals = {}
        if op == "exp":
            a = alg_exp(_element(config, alg))
            result["result"] = a.to_json()
            residuals["membership"] = residual(alg.coordinates(a)[1], MEMBERSHIP_TOL)
            verdict = "OK"
        elif op in ("log", "sqrt"):
            a = _element(config, alg)
            if op == "log":
                cut = AUTO if "cut" not in opts else BranchCut(opts["cut"])
                b = alg_log(alg, a, cut, table, tol, config.seed)
                error = max_norm(alg_exp(b).entries - a.entries)
            else:
                b = alg_sqrt(alg, a, table, tol, config.seed)
                error = max_norm(b.entries @ b.entries - a.entries)
            result["result"] = b.to_json()
            residuals["roundtrip"] = residual(_relative(error, a.entries), ROUNDTRIP_TOL)
            verdict = "IN_EXP_IMAGE"
        elif op == "preimage":
            preimage = has_exp_preimage(alg, _element(config, alg), table, tol)
            result.update(preimage.to_json())
            verdict = "IN_EXP_IMAGE" if preimage else "NOT_IN_EXP_IMAGE"
        elif op == "ker":
            generators = ker_exp_generators(alg, table)
            eye = np.eye(alg.n)
            worst = max((max_norm(alg_exp(g).entries - eye) for g in generators), default=0.0)
            result["generators"] = [g.to_json() for g in generators]
            residuals["exp_identity"] = residual(worst, KERNEL_TOL)
            verdict = str(len(generators))
        elif op == "signs":
            group = sign_group(alg, table)
            eye = np.eye(alg.n)
            worst = max((max_norm(g.array @ g.array - eye) for g in group.generators),
                        default=0.0)
            result["generators"] = [g.to_json() for g in group.generators]
            result["order"] = 2 ** group.m
            residuals["involution"] = residual(worst, REAL_TRUNCATION_TOL)
            verdict = f"Z2^{group.m}"
        elif op == "decompose":
            a = _element(config, alg)
            g, ga, b = sign_decomposition(alg, a, table, tol)
            result.update(sign=g.to_json(), positive_part=ga.to_json(), log=b.to_json())
            error = max_norm(alg_exp(b).entries - ga.entries)
            residuals["roundtrip"] = residual(_relative(error, ga.entries), ROUNDTRIP_TOL)
            verdict = "OK"
        else:
            raise InvalidInput(f"unknown expmap operation {op!r}")
        report.add("expmap", result, verdict=verdict, residuals=residuals)


def _suite_az(config, report, field_, size, samples):
    name = f"suite.az_{'complex' if field_ is FieldTag.COMPLEX else 'real'}"
    scheme, values = _alpha_setting(config.alpha)
    with report.stage(name):
        entry = gallery("az", field_, tol=config.tolerance)
        spec = build_tuple(entry.algebra, None, scheme, config.seed, config.tolerance, values,
                           "az")
        report.add(name, dict(size=len(spec), field=field_.value, tuple=spec.to_json()),
                   verdict=str(len(spec)), expected=str(size))
        alg = close_algebra(spec.operators, config.tolerance)
        check = verify_non_cyclic_commutant(alg, samples, config.seed, config.tolerance)
        ok = check.all_non_cyclic and check.commutant_equals_algebra \
            and check.max_krylov_rank <= 2
        report.add(f"{name}.commutant", check.to_json(),
                   verdict="NON_CYCLIC" if ok else "CYCLIC_FOUND", expected="NON_CYCLIC")


def _suite_f4(config, report):
    scheme, values = _alpha_setting(config.alpha)
    with report.stage("suite.f4"):
        spec = f4_triple(alpha_scheme=scheme, tol=config.tolerance, alpha_values=values)
        upper = np.array([0.0, 1.0])
        check_budget = OrbitBudget(F4_CHECK_DEGREE, config.budget.max_points)
        halfplane = halfplane_check(spec, upper, check_budget)
        worst = 0.0
        for shell in orbit_shells(spec, upper, check_budget):
            closed = f4_closed_form(spec, upper, shell.exponents)
            with np.errstate(all="ignore"):
                error = np.linalg.norm(shell.points - closed, axis=1) \
                    / np.linalg.norm(closed, axis=1)
            error = error[np.isfinite(error)]
            if error.size:
                worst = max(worst, float(error.max()))
        residuals = dict(closed_form=residual(worst, F4_CLOSED_FORM_TOL),
                         height=residual(halfplane.max_relative_error,
                                         halfplane.closed_form_tol))
        report.add("suite.f4.halfplane",
                   dict(halfplane.to_json(), tuple=spec.to_json(), degree=F4_CHECK_DEGREE),
                   verdict="CONFINED" if halfplane.confined else "NOT_CONFINED",
                   expected="CONFINED", residuals=residuals)
        budget = F4_COVERAGE_BUDGET
        box = Box(FieldTag.REAL, 2, [-3.0, 0.05], [3.0, 3.0])
        marks = _checkpoints(config, budget.max_degree)
        for name, x, expected in (("suite.f4.coverage", [0.0, 1.0], None),
                                  ("suite.f4.axis", [1.0, 0.0], "NOWHERE_DENSE_EVIDENCE")):
            cov = coverage(orbit_shells(spec, np.array(x), budget), box, F4_COVERAGE_GRID,
                           marks, config.thresholds)
            _add_coverage(report, name, cov, dict(x=x, budget=budget.to_json()),
                          expected=expected)


def _closed_form_size(field_, n):
    if field_ is FieldTag.COMPLEX:
        return n + 1
    return n // 2 + 1 if n % 2 == 0 else (n + 3) // 2


def _suite_min_size(config, report, max_n):
    scheme, values = _alpha_setting(config.alpha)
    with report.stage("suite.min_size"):
        rows, match = [], True
        for field_ in (FieldTag.COMPLEX, FieldTag.REAL):
            for n in range(1, max_n + 1):
                entry = default_algebra(field_, n)
                spec = build_tuple(entry.algebra, None, scheme, config.seed, config.tolerance,
                                   values, entry.name)
                size = min_tuple_size(field_, n)
                ok = size == len(spec) == _closed_form_size(field_, n)
                match = match and ok
                rows.append(dict(field=field_.value, n=n, min_size=size,
                                 constructed=len(spec), algebra=entry.name))
        report.add("suite.min_size", dict(table=rows), verdict="MATCH" if match else "MISMATCH",
                   expected="MATCH")


def _suite_gallery(config, report):
    with report.stage("suite.gallery"):
        rows, match = [], True
        for name in gallery_names():
            natural = gallery(name, tol=config.tolerance)
            fields = [natural.algebra.field]
            if natural.algebra.field is FieldTag.COMPLEX:
                fields.append(FieldTag.REAL)
            for field_ in fields:
                entry = natural if field_ is natural.algebra.field \
                    else gallery(name, field_, tol=config.tolerance)
                _, counts, expected, ok = _gallery_counts(entry, config)
                match = match and ok
                rows.append(dict(name=name, field=field_.value, counts=counts,
                                 expected=expected))
        report.add("suite.gallery", dict(table=rows), verdict="MATCH" if match else "MISMATCH",
                   expected="MATCH")


def _suite_nondiagonalizable(config, report, max_n):
    scheme, values = _alpha_setting(config.alpha)
    with report.stage("suite.nondiagonalizable"):
        rows, match = [], True
        for n in range(2, max_n + 1):
            entry = gallery("jordan_diag", FieldTag.COMPLEX, n=n, tol=config.tolerance)
            spec = build_tuple(entry.algebra, None, scheme, config.seed, config.tolerance,
                               values, entry.name)
            size = min_nondiagonalizable_size(n)
            match = match and size == len(spec)
            rows.append(dict(n=n, min_size=size, constructed=len(spec)))
        report.add("suite.nondiagonalizable", dict(table=rows),
                   verdict="MATCH" if match else "MISMATCH", expected="MATCH")


def _cmd_suite(config, report):
    opts = config.options
    samples = opts.get("samples", DEFAULT_COMMUTANT_SAMPLES)
    max_n = opts.get("max_n", DEFAULT_SUITE_MAX_N)
    _suite_az(config, report, FieldTag.COMPLEX, 6, samples)
    _suite_az(config, report, FieldTag.REAL, 4, samples)
    _suite_f4(config, report)
    _suite_min_size(config, report, max_n)
    _suite_gallery(config, report)
    _suite_nondiagonalizable(config, report, max_n)


#: Registry of the command implementations.
COMMANDS = {
    "analyze": _cmd_analyze,
    "construct": _cmd_construct,
    "min-size": _cmd_min_size,
    "gallery": _cmd_gallery,
    "orbit": _cmd_orbit,
    "verify": _cmd_verify,
    "kronecker": _cmd_kronecker,
    "expmap": _cmd_expmap,
    "paper-suite": _cmd_suite,
}


#
# Running
#


def generate_summary_json(data, results_dir):
    json_file = results_dir / REPORT_FILE
    with open(json_file, "w") as f:
        json.dump(data, f, indent=2)
    return json_file


def write_summaries(report, data):
    """Write the ``--summary`` formats into ``--results-path``."""
    formats = report.config.summary
    results_dir = Path(report.config.results_path)
    results_dir.mkdir(parents=True, exist_ok=True)
    kwargs = {}
    if "json" in formats:
        summary = generate_summary_json(data, results_dir)
        logger.info(f"A JSON report can be found at: {summary}")
        kwargs["report_file"] = REPORT_FILE
    if "html" in formats:
        summary = generate_summary_html(report.stages, results_dir, **kwargs)
        logger.info(f"A summary of the run can be found at: {summary}")
    if "basic-html" in formats:
        summary = generate_summary_basic_html(report.stages, results_dir, **kwargs)
        logger.info(f"A summary of the run can be found at: {summary}")


def run(config):
    """
    Execute a config and write its artifacts.

    Returns
    -------
    RunReport

    Raises
    ------
    HypertupleError
        With the failing stage recorded in its details.
    OSError
        When an input or output file cannot be used.

    """
    report = RunReport(config)
    logger.info(f"{config.command}: seed {config.seed}")
    start = time.perf_counter()
    COMMANDS[config.command](config, report)
    report.wall_time = time.perf_counter() - start
    if config.expect is not None:
        report.expect(config.expect)
    data = report.to_json()
    if config.json_out:
        with open(config.json_out, "w") as f:
            f.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
    if config.summary:
        write_summaries(report, data)
    return report


def _configure_logger(verbose):
    # a dedicated logger, independent of whoever embeds the package;
    # debug output only with "-vv" or more
    level = logging.DEBUG if verbose > 1 else logging.INFO
    fmt = "%(levelname)-8s %(name)s:%(filename)s:%(lineno)d %(message)s"
    handler = logging.StreamHandler()
    handler.set_name("hypertuple-cli")
    handler.setFormatter(logging.Formatter(fmt))
    package_logger = logging.getLogger("hypertuple")
    package_logger.handlers = [h for h in package_logger.handlers
                               if h.get_name() != "hypertuple-cli"]
    package_logger.propagate = False
    package_logger.setLevel(level)
    package_logger.addHandler(handler)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("run options")
    group.add_argument("--seed", type=int, help=f"random seed (default {DEFAULT_SEED})")
    group.add_argument("--tol", help="tolerance overrides, e.g. eq=1e-9,rank=1e-8,cluster=1e-6")
    group.add_argument("--alpha", help="independent reals: sqrt-primes, log-primes or "
                                       "user:a1,a2,...; kronecker also takes sqrt-primes:<d> "
                                       "(default sqrt-primes)")
    group.add_argument("--json-out", help="write the run report to this file")
    group.add_argument("--csv-out", help="write orbit points to this CSV file")
    group.add_argument("--expect", help="expected verdict, or stage=VERDICT pairs separated "
                                        "by commas")
    group.add_argument("--config", help=f"INI file with a [{INI_SECTION}] section of defaults")
    group.add_argument("--summary", help="summary formats written to --results-path: json, "
                                         "html and/or basic-html, separated by commas")
    group.add_argument("--results-path", help="directory for summaries "
                                              f"(default {DEFAULT_RESULTS_PATH})")
    group.add_argument("-v", "--verbose", action="count", default=0,
                       help="more output; -vv for debug messages")

    source = argparse.ArgumentParser(add_help=False)
    group = source.add_argument_group("tuple source")
    group.add_argument("--tuple", help="tuple JSON file (or a run report holding a tuple)")
    group.add_argument("--algebra", choices=gallery_names(), help="gallery algebra")
    group.add_argument("--field", choices=["R", "C"], help="scalar field")
    group.add_argument("--dim", type=int, help="dimension n of K^n")
    group.add_argument("--m", type=int, help="block count of the rotation sums")
    group.add_argument("--f4", help="a1,b1,a2,b2 of the f4 triple")

    budget = argparse.ArgumentParser(add_help=False)
    group = budget.add_argument_group("orbit budget")
    group.add_argument("--max-degree", type=int,
                       help=f"total degree budget (default {DEFAULT_MAX_DEGREE})")
    group.add_argument("--max-points", type=int,
                       help=f"point budget (default {DEFAULT_MAX_POINTS})")
    group.add_argument("--box", help="lo,hi or lo1,hi1,lo2,hi2,... in real coordinates")
    group.add_argument("--grid", type=int, help=f"cells per axis (default {DEFAULT_GRID})")
    group.add_argument("--checkpoints", help="degrees at which coverage is recorded")
    group.add_argument("--dense-threshold", type=float)
    group.add_argument("--sparse-threshold", type=float)
    group.add_argument("--plateau-eps", type=float)

    parser = argparse.ArgumentParser(
        prog="hypertuple",
        description="Minimal hypercyclic tuples of commuting matrices and orbit density "
                    "experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[common, source],
                   help="characters, cyclicity and predicted tuple size of an algebra")
    sub.add_parser("construct", parents=[common, source],
                   help="build a minimal hypercyclic tuple")

    p_min = sub.add_parser("min-size", parents=[common], help="minimal hypercyclic tuple size")
    p_min.add_argument("--field", choices=["R", "C"])
    p_min.add_argument("--dim", type=int)

    p_gallery = sub.add_parser("gallery", parents=[common], help="explicit algebras")
    p_gallery.add_argument("action", choices=["list", "show"])
    p_gallery.add_argument("name", nargs="?")
    p_gallery.add_argument("--field", choices=["R", "C"])
    p_gallery.add_argument("--dim", type=int)
    p_gallery.add_argument("--m", type=int)

    p_orbit = sub.add_parser("orbit", parents=[common, source, budget],
                             help="enumerate an orbit and measure its coverage")
    p_orbit.add_argument("--x", help="starting vector, e.g. 1,0 or 1+2j,0")

    p_verify = sub.add_parser("verify", parents=[common, source, budget],
                              help="validate a tuple and gather density evidence")
    p_verify.add_argument("--x", help="starting vector (default: a cyclic vector)")
    p_verify.add_argument("--drop", type=int, help="also run without this operator")

    p_kron = sub.add_parser("kronecker", parents=[common, budget],
                            help="simultaneous Diophantine approximation")
    p_kron.add_argument("--target", help="target x1,...,xd")
    p_kron.add_argument("--eps", type=float, help=f"accepted error "
                                                  f"(default {DEFAULT_KRONECKER_EPS})")
    p_kron.add_argument("--m0-max", type=int,
                        help=f"largest m0 scanned (default {DEFAULT_KRONECKER_M0_MAX})")
    p_kron.add_argument("--semigroup", action="store_true",
                        help="also measure coverage of the completed additive semigroup")

    p_exp = sub.add_parser("expmap", parents=[common, source],
                           help="exponential and logarithm inside an algebra")
    p_exp.add_argument("--op", required=True,
                       choices=["exp", "log", "sqrt", "preimage", "ker", "signs", "decompose"])
    p_exp.add_argument("--element", help="matrix JSON (inline or file)")
    p_exp.add_argument("--coeffs", help="coordinates in the algebra basis")
    p_exp.add_argument("--cut", type=float, help="branch cut angle for log (default: auto)")

    p_suite = sub.add_parser("paper-suite", parents=[common, budget],
                             help="reproduce the reference objects in one run")
    p_suite.add_argument("--samples", type=int,
                         help=f"commutant samples (default {DEFAULT_COMMUTANT_SAMPLES})")
    p_suite.add_argument("--max-n", type=int,
                         help=f"largest dimension tabulated (default {DEFAULT_SUITE_MAX_N})")
    return parser


def _diagnose(diagnostic):
    print(json.dumps(diagnostic, sort_keys=True), file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logger(args.verbose)
    try:
        report = run(load_config(args))
    except HypertupleError as error:
        _diagnose(dict(error.to_dict(), command=args.command))
        return EXIT_ERROR
    except OSError as error:
        _diagnose(dict(error=type(error).__name__, stage="io", command=args.command,
                       message=error.strerror or str(error),
                       details=dict(filename=error.filename)))
        return EXIT_ERROR
    print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    return EXIT_OK if report.status == "passed" else EXIT_UNEXPECTED


if __name__ == "__main__":
    raise SystemExit(main())
