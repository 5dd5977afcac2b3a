"""Figure specifications: what to read, what kind of plot, which series."""

import json
from dataclasses import dataclass, field

__all__ = ["FIGURE_KINDS", "FigureSpec", "load_spec"]

FIGURE_KINDS = ("loglog_h", "semilog_N", "profile", "expfactor")

_DEFAULT_SERIES = {
    "loglog_h": ("error", "R_st"),
    "semilog_N": ("R_stoch",),
    "profile": ("mode0", "R_st_density", "R_stoch_density"),
    "expfactor": ("exp_factor",),
}


@dataclass(frozen=True)
class FigureSpec:
    """One figure: input CSV path(s), plot kind, series columns, output path."""

    csv_paths: tuple
    kind: str
    series: tuple = ()
    labels: tuple = ()
    out_path: str = ""
    title: str = ""

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; "
                             f"choose one of {', '.join(FIGURE_KINDS)}")
        if not self.csv_paths:
            raise ValueError("at least one input CSV path is required")
        if not self.series:
            object.__setattr__(self, "series", _DEFAULT_SERIES[self.kind])
        if self.labels and len(self.labels) != len(self.csv_paths):
            raise ValueError("labels must match the number of input CSVs")


def load_spec(path: str, out_override: str = "") -> FigureSpec:
    """Read a JSON figure spec; `out_override` replaces its output path."""
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: figure spec must be a JSON object")
    known = {"csv", "kind", "series", "labels", "out", "title"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValueError(f"{path}: unknown spec key(s) {', '.join(unknown)}; "
                         f"known keys: {', '.join(sorted(known))}")
    csv_paths = raw.get("csv", ())
    if isinstance(csv_paths, str):
        csv_paths = (csv_paths,)
    return FigureSpec(
        csv_paths=tuple(csv_paths),
        kind=raw.get("kind", ""),
        series=tuple(raw.get("series", ())),
        labels=tuple(raw.get("labels", ())),
        out_path=out_override or raw.get("out", ""),
        title=raw.get("title", ""),
    )
