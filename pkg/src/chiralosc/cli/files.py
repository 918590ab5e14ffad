"""Trajectory files: CSV (header ``t,<labels>``) and JSON with metadata."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..core import Params
from ..dynamics import CONFIG_LABELS, Formulation, Trajectory


class TrajectoryReadError(ValueError):
    pass


_BY_LABELS = {
    Formulation.DIRAC_BRACKET_CANONICAL_H.labels: Formulation.DIRAC_BRACKET_CANONICAL_H,
    Formulation.DARBOUX_CANONICAL_H.labels: Formulation.DARBOUX_CANONICAL_H,
    Formulation.REDUCED_LIE_POISSON.labels: Formulation.REDUCED_LIE_POISSON,
    CONFIG_LABELS: None,
}


def write_csv(traj: Trajectory, path) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("t",) + tuple(traj.labels))
        for t, row in zip(traj.times, traj.states):
            w.writerow([format(float(t), ".17g")] + [format(float(v), ".17g") for v in row])


def trajectory_dict(traj: Trajectory, **extra) -> dict:
    return {
        "formulation": traj.formulation.value if traj.formulation else None,
        "params": {"lam": traj.params.lam, "mass": traj.params.mass},
        "labels": list(traj.labels),
        "times": traj.times.tolist(),
        "states": traj.states.tolist(),
        **extra,
    }


def write_json(traj: Trajectory, path, **extra) -> None:
    Path(path).write_text(json.dumps(trajectory_dict(traj, **extra)) + "\n", encoding="utf-8")


def write_trajectory(traj: Trajectory, path, fmt: str | None = None, **extra) -> None:
    fmt = fmt or ("json" if str(path).lower().endswith(".json") else "csv")
    if fmt == "json":
        write_json(traj, path, **extra)
    else:
        write_csv(traj, path)


def read_metadata(path) -> dict:
    """Extra JSON fields of a trajectory file (empty for CSV)."""
    path = Path(path)
    if path.suffix.lower() != ".json":
        return {}
    try:
        d = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise TrajectoryReadError(f"cannot read {path}: {e}") from None
    return {k: v for k, v in d.items() if k not in ("labels", "times", "states")}


def read_trajectory(path, params: Params | None = None, formulation: Formulation | None = None) -> Trajectory:
    """Load a CSV or JSON trajectory.

    ``params`` and ``formulation`` override what the file records; CSV files
    record neither, so the formulation is inferred from the column labels.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise TrajectoryReadError(f"cannot read {path}: {e}") from None
    try:
        if path.suffix.lower() == ".json":
            d = json.loads(text)
            labels = tuple(d["labels"])
            times = np.array(d["times"], float)
            states = np.array(d["states"], float).reshape(len(times), len(labels))
            if params is None and d.get("params"):
                params = Params(d["params"]["lam"], d["params"]["mass"])
            if formulation is None and d.get("formulation"):
                formulation = Formulation(d["formulation"])
        else:
            rows = list(csv.reader(text.splitlines()))
            if not rows or rows[0][0] != "t":
                raise ValueError("first header column must be t")
            labels = tuple(rows[0][1:])
            data = np.array([[float(v) for v in r] for r in rows[1:] if r], float).reshape(-1, len(labels) + 1)
            times, states = data[:, 0], data[:, 1:]
    except (ValueError, KeyError, TypeError, IndexError, json.JSONDecodeError) as e:
        raise TrajectoryReadError(f"cannot parse {path}: {e}") from None
    if labels not in _BY_LABELS:
        raise TrajectoryReadError(f"{path}: unrecognised columns {','.join(labels)}")
    if formulation is None:
        formulation = _BY_LABELS[labels]
    elif formulation.labels != labels:
        raise TrajectoryReadError(f"{path}: columns do not match {formulation.value}")
    return Trajectory(times, states, formulation, params or Params(), labels)
