"""CSV/JSON serialization of convergence tables and residual profiles."""

import json
import math
import os

from .cases import ROW_FIELDS, ConvergenceRow, RunResult

__all__ = ["CSV_HEADER", "format_float", "emit", "write_profile", "read_table"]

CSV_HEADER = ",".join(ROW_FIELDS)

PROFILE_HEADER = "x,mode0,R_st_density,R_stoch_density"


def format_float(x) -> str:
    """17-significant-digit decimal form; round-trips doubles exactly."""
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return "%.17g" % x


def _atomic_write(path: str, text: str):
    tmp = path + ".tmp"
    try:
        with open(tmp, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc


def emit(table: list, format: str = "csv", path: str = None):
    """Serialize a list of ConvergenceRow to csv or json at path.

    With path=None the serialized text is returned instead of written.
    """
    if format == "csv":
        lines = [CSV_HEADER]
        for row in table:
            vals = row.as_tuple()
            cells = [str(vals[0]), str(vals[1])] + [format_float(v) for v in vals[2:4]]
            cells += [str(vals[4]), str(vals[5])] + [format_float(v) for v in vals[6:]]
            lines.append(",".join(cells))
        text = "\n".join(lines) + "\n"
    elif format == "json":
        records = [dict(zip(ROW_FIELDS,
                            [None if isinstance(v, float) and math.isnan(v) else v
                             for v in row.as_tuple()]))
                   for row in table]
        text = json.dumps(records, indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {format!r}")
    if path is None:
        return text
    _atomic_write(path, text)
    return path


def write_profile(result: RunResult, path: str):
    """Per-element sidecar: element centers, mode-0 mean, residual densities."""
    mesh = result.trajectory.space.mesh
    centers = 0.5 * (mesh.vertices[:-1] + mesh.vertices[1:])
    mode0 = result.trajectory.states[-1].cell_means()[:, 0]
    r_st = result.residuals.element_r_st_density
    r_stoch = result.residuals.element_r_stoch_density
    lines = [PROFILE_HEADER]
    for x, m, a, b in zip(centers, mode0, r_st, r_stoch):
        lines.append(",".join(format_float(v) for v in (x, m, a, b)))
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def read_table(path: str) -> list:
    """Parse a CSV produced by emit back into ConvergenceRow objects."""
    with open(path) as f:
        lines = [ln.strip() for ln in f if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: unexpected header")
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        vals = dict(zip(ROW_FIELDS, cells))
        rows.append(ConvergenceRow(
            level=int(vals["level"]), M=int(vals["M"]), h=float(vals["h"]),
            dt=float(vals["dt"]), N=int(vals["N"]), p=int(vals["p"]),
            error=float(vals["error"]), R_st=float(vals["R_st"]),
            R_stoch=float(vals["R_stoch"]), E0_st=float(vals["E0_st"]),
            E0_stoch=float(vals["E0_stoch"]), bound=float(vals["bound"]),
            exp_factor=float(vals["exp_factor"]),
            eoc_error=float(vals["eoc_error"]), eoc_R_st=float(vals["eoc_R_st"]),
            wall_time=float(vals["wall_time"])))
    return rows
