"""JSON and CSV codecs for matrices, diagrams, morphisms, results and reports.

Matrix entries travel as decimal strings ("12") or "p/q" strings so that no
JSON reader ever rounds them. Hand-written inputs may use plain integers.
"""
import csv
import io
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from .bratteli import BratteliDiagram, SplitResult
from .construct import ConstructionResult, Diagnostic, LevelRecord, VerificationReport
from .errors import DimensionError, SadicError, SerializationError
from .exact_linear import AnyMatrix, ExactMatrix, RationalMatrix
from .language import ComplexityProfile, ToeplitzReport, complexity_bound
from .morphisms import DirectiveSequence, Morphism, letters, read_morphisms
from .targets import ComplexityTarget

logger = logging.getLogger("sadic-builder")

DEFAULT_MAX_EXPLICIT_IMAGE = 4096

PROFILE_HEADER = ["n", "p", "target", "bound", "ratio"]
TOEPLITZ_HEADER = ["position", "period"]


def _entry_text(x: Union[int, Fraction]) -> str:
    return str(x)


def matrix_to_json(m: AnyMatrix) -> List[List[str]]:
    return [[_entry_text(x) for x in row] for row in m.tolist()]


def matrix_from_json(data: Any) -> AnyMatrix:
    """ExactMatrix unless some entry is written as a fraction."""
    if not isinstance(data, list) or not data or not all(isinstance(row, list) for row in data):
        raise SerializationError("a matrix is a non-empty array of arrays")
    rational = any(isinstance(x, str) and "/" in x for row in data for x in row)
    try:
        return RationalMatrix(data) if rational else ExactMatrix(data)
    except (DimensionError, ValueError, ZeroDivisionError, TypeError) as e:
        raise SerializationError(f"invalid matrix entry: {e}") from e


def _exact_from_json(data: Any) -> ExactMatrix:
    m = matrix_from_json(data)
    if isinstance(m, RationalMatrix):
        if not m.is_integral():
            raise SerializationError("incidence matrices must have integer entries")
        return m.to_exact()
    return m


def morphism_to_json(tau: Morphism, max_explicit_image: int = DEFAULT_MAX_EXPLICIT_IMAGE) -> Dict[str, Any]:
    data: Dict[str, Any] = {"domain": tau.domain, "codomain": tau.codomain}
    if max(tau.lengths()) > max_explicit_image:
        data["runs"] = [[[a, n] for a, n in block] for block in tau.runs()]
    else:
        data["images"] = [letters(image) for image in tau.images]
    return data


def morphism_from_json(data: Dict[str, Any]) -> Morphism:
    if not isinstance(data, dict):
        raise SerializationError("a morphism is a JSON object")
    codomain = data.get("codomain")
    if "runs" in data:
        runs = [[(int(a), int(n)) for a, n in block] for block in data["runs"]]
        tau = Morphism.from_runs(runs, codomain)
    elif "images" in data:
        tau = Morphism([[int(a) for a in image] for image in data["images"]], codomain)
    else:
        raise SerializationError("a morphism needs 'images' or 'runs'")
    if "domain" in data and int(data["domain"]) != tau.domain:
        raise SerializationError(f"morphism declares domain {data['domain']} but has {tau.domain} images")
    return tau


def diagram_to_json(d: BratteliDiagram, max_explicit_image: int = DEFAULT_MAX_EXPLICIT_IMAGE) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "level_sizes": list(d.level_sizes),
        "incidences": [matrix_to_json(a) for a in d.incidences],
    }
    if d.repeat:
        data["repeat"] = [matrix_to_json(a) for a in d.repeat]
    if d.order is not None:
        data["order"] = [morphism_to_json(tau, max_explicit_image) for tau in d.order]
    return data


def diagram_from_json(data: Dict[str, Any]) -> BratteliDiagram:
    if not isinstance(data, dict) or "incidences" not in data:
        raise SerializationError("a diagram is an object with an 'incidences' array")
    incidences = [_exact_from_json(a) for a in data["incidences"]]
    repeat = [_exact_from_json(a) for a in data.get("repeat") or []]
    if not incidences and not repeat:
        raise SerializationError("a diagram needs at least one incidence matrix")
    sizes = data.get("level_sizes") or [1] + [a.rows for a in incidences]
    order = None
    if data.get("order") is not None:
        order = tuple(morphism_from_json(tau) for tau in data["order"])
    return BratteliDiagram(tuple(sizes), tuple(incidences), order, tuple(repeat))


def directive_to_json(ds: DirectiveSequence, max_explicit_image: int = DEFAULT_MAX_EXPLICIT_IMAGE) -> Dict[str, Any]:
    return {"morphisms": [morphism_to_json(tau, max_explicit_image) for tau in ds]}


def directive_from_json(data: Union[Dict[str, Any], List[Any]], depth: Optional[int] = None) -> DirectiveSequence:
    """Directive sequence from {"morphisms": [...], "repeat": [...]} or a bare list.

    ``repeat`` morphisms are appended cyclically until ``depth`` morphisms are
    present (or once when no depth is given).
    """
    if isinstance(data, list):
        data = {"morphisms": data}
    if not isinstance(data, dict):
        raise SerializationError("a directive sequence is an object or an array of morphisms")
    prefix = [morphism_from_json(tau) for tau in data.get("morphisms") or []]
    cycle = [morphism_from_json(tau) for tau in data.get("repeat") or []]
    if depth is None:
        depth = int(data.get("depth") or len(prefix) + len(cycle))
    morphisms = prefix[:depth]
    while len(morphisms) < depth:
        if not cycle:
            raise SerializationError(f"directive sequence has {len(prefix)} morphisms and no repeat rule for depth {depth}")
        morphisms.append(cycle[(len(morphisms) - len(prefix)) % len(cycle)])
    return DirectiveSequence(morphisms)


def _split_to_json(split: SplitResult) -> Dict[str, Any]:
    return {"d": split.d, "B": matrix_to_json(split.b), "C": matrix_to_json(split.c)}


def result_to_json(res: ConstructionResult, max_explicit_image: int = DEFAULT_MAX_EXPLICIT_IMAGE) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "mode": res.mode,
        "target": res.target,
        "depth": res.depth,
        "status": res.status(),
        "error": res.error,
        "levels": [
            {k: v for k, v in vars(level).items() if v is not None and k != "window"}
            | ({"window": list(level.window)} if level.window else {})
            for level in res.levels
        ],
        "cuts": list(res.cuts),
        "periods": [str(p) for p in res.periods],
        "a_seq": [matrix_to_json(a) for a in res.a_seq],
        "j_seq": [matrix_to_json(j) for j in res.j_seq],
        "telescoped": [matrix_to_json(a) for a in res.telescoped],
        "splits": [_split_to_json(s) for s in res.splits],
        "diagnostics": [
            {
                "level": d.level,
                "index": d.array_index,
                "condition": d.condition,
                "value": d.value,
                "pass": d.passed,
                "required": d.required,
            }
            for d in res.diagnostics
        ],
    }
    if res.diagram is not None:
        data["diagram"] = diagram_to_json(res.diagram, max_explicit_image)
    if res.directive is not None:
        data["morphisms"] = directive_to_json(res.directive, max_explicit_image)["morphisms"]
    return data


def result_from_json(data: Dict[str, Any]) -> ConstructionResult:
    """ConstructionResult as written by ``result_to_json`` (splits are not restored)."""
    if not isinstance(data, dict) or "mode" not in data:
        raise SerializationError("not a construction result: missing 'mode'")
    res = ConstructionResult(str(data["mode"]), str(data.get("target", "")), int(data.get("depth", 0)))
    res.error = data.get("error")
    res.levels = tuple(
        LevelRecord(**{k: (tuple(v) if k == "window" else v) for k, v in level.items()})
        for level in data.get("levels", [])
    )
    res.cuts = tuple(int(c) for c in data.get("cuts", []))
    res.periods = tuple(int(p) for p in data.get("periods", []))
    res.a_seq = tuple(matrix_from_json(a) for a in data.get("a_seq", []))
    res.j_seq = tuple(RationalMatrix(matrix_from_json(j)) for j in data.get("j_seq", []))
    res.telescoped = tuple(_exact_from_json(a) for a in data.get("telescoped", []))
    res.diagnostics = [
        Diagnostic(
            int(d["level"]),
            str(d["condition"]),
            str(d.get("value", "")),
            bool(d["pass"]),
            bool(d.get("required", True)),
            None if d.get("index") is None else int(d["index"]),
        )
        for d in data.get("diagnostics", [])
    ]
    if data.get("diagram") is not None:
        res.diagram = diagram_from_json(data["diagram"])
        if "morphisms" in data:
            res.directive = directive_from_json(data["morphisms"])
        elif res.diagram.is_ordered:
            res.directive = read_morphisms(res.diagram)
    return res


def profile_csv(profile: ComplexityProfile, target: Optional[ComplexityTarget], ds: Optional[DirectiveSequence] = None) -> str:
    """Rows n,p,target,bound,ratio; bound is blank where it is not defined."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(PROFILE_HEADER)
    shortest = ds.norm(0, 1) if ds is not None else None
    for n, p in profile.items():
        target_value = ratio = ""
        if target is not None and (target.horizon is None or n <= target.horizon):
            value = target.approx(n)
            target_value = f"{value:.6f}"
            ratio = f"{p / value:.6f}"
        bound = ""
        if ds is not None and n >= shortest:
            try:
                bound = str(complexity_bound(ds, n).bound)
            except SadicError as e:
                logger.debug(f"No bound at n={n}: {e}")
        writer.writerow([n, p, target_value, bound, ratio])
    return out.getvalue()


def toeplitz_csv(report: ToeplitzReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TOEPLITZ_HEADER)
    for position, period in enumerate(report.periods):
        writer.writerow([position, "" if period is None else period])
    return out.getvalue()


def verification_to_json(report: VerificationReport) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "mode": report.mode,
        "status": report.status,
        "failures": list(report.failures),
        "notes": list(report.notes),
        "constants": dict(report.constants),
        "decade_maxima": [[decade, str(key)] for decade, key in report.decade_maxima],
        "decades_decreasing": report.decades_decreasing,
    }
    if report.profile is not None:
        data["profile"] = {
            "n_max": report.profile.n_max,
            "level": report.profile.level,
            "partial": report.profile.partial,
        }
    if report.bounds:
        data["bounds_checked"] = len(report.bounds)
        data["regimes"] = sorted({row.regime for row in report.bounds})
    if report.adapted is not None:
        data["adapted"] = [
            {
                "level": level.level,
                "j_positive": level.j_positive,
                "j_inverse_positive": level.j_inverse_positive,
                "smallest_m": level.smallest_m,
                "b_integral": level.b_integral,
                "b_positive": level.b_positive,
            }
            for level in report.adapted.levels
        ]
    data["recognizability"] = [
        {
            "level": i,
            "letter_injective": rec.letter_injective,
            "marker_holds": rec.marker_holds,
            "words_checked": rec.words_checked,
            "ambiguous": len(rec.ambiguous),
        }
        for i, rec in report.recognizability
    ]
    if report.toeplitz is not None:
        data["toeplitz"] = {
            "window": report.toeplitz.window,
            "candidates": list(report.toeplitz.candidates),
            "hole_densities": [[q, str(d)] for q, d in report.toeplitz.hole_densities],
            "unverified": len(report.toeplitz.unverified),
            "flag": report.toeplitz.flag,
            "strict": report.toeplitz.strict,
        }
    if report.prefix is not None:
        data["prefix"] = {
            "left_proper": report.prefix.left_proper,
            "length": report.prefix.length,
            "stable": report.prefix.stable,
        }
    if report.boshernitzan is not None:
        data["boshernitzan"] = {
            "alpha_estimate": str(report.boshernitzan.alpha_estimate),
            "measure_bound": report.boshernitzan.measure_bound,
        }
    return data


def load_json(path: Union[str, Path]) -> Any:
    with open(path, "r") as f:
        return json.load(f)


def write_json(path: Union[str, Path], data: Any):
    with open(path, "w") as f:
        json.dump(data, f, indent=2)
        f.write("\n")
    logger.info(f"Wrote {path}")


def write_text(path: Union[str, Path], text: str):
    with open(path, "w", newline="") as f:
        f.write(text)
    logger.info(f"Wrote {path}")
