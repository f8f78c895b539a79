"""Problem and solution file formats (single-document JSON).

A problem file stores the standard-form data in one self-describing
document:

    {"m": ..., "n": ...,
     "A": {"colptr": [...], "rowidx": [...], "vals": [...]},
     "b": [...], "c": [...],
     "cone": {"z": ..., "l": ..., "q": [...], "s": [...]}}

A solution file stores the status string (lower snake case), the applicable
vectors, and an info block.  Floats are written with Python's shortest
round-trip representation, so read(write(x)) == x for every binary64 value.
"""

import json

import numpy as np

from .cones import ConeSpec
from .problem import ProblemData
from .sparse_linalg import SparseMatrix
from .solver import Solution, SolveInfo, Status


class FileFormatError(ValueError):
    """Malformed document; `member` names the offending field."""

    def __init__(self, member, message):
        super().__init__(f"{member}: {message}")
        self.member = member


def _require(doc, member, kind):
    if member not in doc:
        raise FileFormatError(member, "missing member")
    value = doc[member]
    if kind == "int":
        if not isinstance(value, int) or isinstance(value, bool):
            raise FileFormatError(member, "expected an integer")
    elif kind == "object":
        if not isinstance(value, dict):
            raise FileFormatError(member, "expected an object")
    elif kind == "int_array":
        if not isinstance(value, list) or any(
            not isinstance(v, int) or isinstance(v, bool) for v in value
        ):
            raise FileFormatError(member, "expected an array of integers")
    elif kind == "num_array":
        if not isinstance(value, list) or any(
            not isinstance(v, (int, float)) or isinstance(v, bool) for v in value
        ):
            raise FileFormatError(member, "expected an array of numbers")
    return value


def problem_to_dict(data):
    return {
        "m": int(data.m),
        "n": int(data.n),
        "A": {
            "colptr": data.A.colptr.tolist(),
            "rowidx": data.A.rowidx.tolist(),
            "vals": data.A.vals.tolist(),
        },
        "b": data.b.tolist(),
        "c": data.c.tolist(),
        "cone": {
            "z": data.spec.zero_dim,
            "l": data.spec.nonneg_dim,
            "q": list(data.spec.soc_dims),
            "s": list(data.spec.psd_sides),
        },
    }


def problem_from_dict(doc):
    if not isinstance(doc, dict):
        raise FileFormatError("<document>", "expected a JSON object")
    m = _require(doc, "m", "int")
    n = _require(doc, "n", "int")
    a_doc = _require(doc, "A", "object")
    colptr = _require(a_doc, "colptr", "int_array")
    rowidx = _require(a_doc, "rowidx", "int_array")
    vals = _require(a_doc, "vals", "num_array")
    b = _require(doc, "b", "num_array")
    c = _require(doc, "c", "num_array")
    cone = _require(doc, "cone", "object")
    z = _require(cone, "z", "int")
    l = _require(cone, "l", "int")
    q = _require(cone, "q", "int_array")
    s = _require(cone, "s", "int_array")
    try:
        A = SparseMatrix(
            m, n, np.asarray(colptr), np.asarray(rowidx), np.asarray(vals)
        )
    except ValueError as exc:
        raise FileFormatError("A", str(exc)) from exc
    try:
        spec = ConeSpec(zero_dim=z, nonneg_dim=l, soc_dims=tuple(q), psd_sides=tuple(s))
    except ValueError as exc:
        raise FileFormatError("cone", str(exc)) from exc
    try:
        return ProblemData(A, np.asarray(b, dtype=float), np.asarray(c, dtype=float), spec)
    except ValueError as exc:
        raise FileFormatError("b/c/cone", str(exc)) from exc


def _vector_field(doc, member, expected_len):
    if member not in doc or doc[member] is None:
        return None
    arr = _require(doc, member, "num_array")
    if expected_len is not None and len(arr) != expected_len:
        raise FileFormatError(member, f"expected length {expected_len}, got {len(arr)}")
    return np.asarray(arr, dtype=float)


def _finite_or_none(x):
    x = float(x)
    return x if np.isfinite(x) else None


def solution_to_dict(sol):
    doc = {"status": sol.status.value}
    for name, vec in (
        ("x", sol.x),
        ("y", sol.y),
        ("s", sol.s),
        ("certificate", sol.certificate),
    ):
        if vec is not None:
            doc[name] = np.asarray(vec, dtype=float).tolist()
    doc["info"] = {
        "iters": int(sol.info.iterations),
        "pri_res": _finite_or_none(sol.info.pri_res),
        "dual_res": _finite_or_none(sol.info.dual_res),
        "gap": _finite_or_none(sol.info.gap),
        "solve_time_ms": 1000.0 * sol.info.solve_time,
    }
    return doc


def solution_from_dict(doc):
    if not isinstance(doc, dict):
        raise FileFormatError("<document>", "expected a JSON object")
    status_str = doc.get("status")
    try:
        status = Status(status_str)
    except ValueError:
        raise FileFormatError("status", f"unknown status {status_str!r}") from None
    sol = Solution(status=status)
    sol.x = _vector_field(doc, "x", None)
    sol.y = _vector_field(doc, "y", None)
    sol.s = _vector_field(doc, "s", None)
    sol.certificate = _vector_field(doc, "certificate", None)
    info = doc.get("info", {})
    if not isinstance(info, dict):
        raise FileFormatError("info", "expected an object")
    sol.info = SolveInfo(
        iterations=int(info.get("iters", 0)),
        pri_res=np.nan if info.get("pri_res") is None else float(info["pri_res"]),
        dual_res=np.nan if info.get("dual_res") is None else float(info["dual_res"]),
        gap=np.nan if info.get("gap") is None else float(info["gap"]),
        solve_time=float(info.get("solve_time_ms", 0.0)) / 1000.0,
    )
    return sol


def _dump(doc, path):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FileFormatError("<document>", f"invalid JSON: {exc}") from exc


def write_problem(path, data):
    _dump(problem_to_dict(data), path)


def read_problem(path):
    return problem_from_dict(_load(path))


def write_solution(path, sol):
    _dump(solution_to_dict(sol), path)


def read_solution(path):
    return solution_from_dict(_load(path))
