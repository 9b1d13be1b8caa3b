"""Experiment reports and deterministic CSV/JSON emission.

Floats are rendered with repr (shortest round-trip form), configs are
echoed as sorted key=value lines, and nothing time- or host-dependent
is ever written, so a rerun with the same seed produces byte-identical
files.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

__all__ = ["ExperimentReport", "binomial_report", "render_rows", "write_rows", "format_cell"]


@dataclass(frozen=True)
class ExperimentReport:
    """Point estimate with binomial CI and the parameters that produced it."""

    estimate: float
    trials: int
    ci95_halfwidth: float
    counts: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def to_json_dict(self):
        return {
            "estimate": self.estimate,
            "trials": self.trials,
            "ci95": self.ci95_halfwidth,
            "counts": dict(self.counts),
            "params": dict(self.params),
        }


def binomial_report(successes, trials, params=None, counts=None):
    """Normal-approximation report for a proportion; needs trials >= 100."""
    if trials < 100:
        raise ValueError("need at least 100 trials for the normal approximation")
    if not 0 <= successes <= trials:
        raise ValueError("successes out of range")
    p = successes / trials
    halfwidth = 1.96 * math.sqrt(p * (1 - p) / trials)
    return ExperimentReport(p, trials, halfwidth, counts or {}, params or {})


def format_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_rows(fmt, columns, rows, config, version):
    """Render a table to CSV or JSON text with a config echo block."""
    if fmt == "csv":
        out = io.StringIO()
        out.write(f"# prclab {version}\n")
        for key in sorted(config):
            out.write(f"# {key}={format_cell(config[key])}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
        return out.getvalue()
    if fmt == "json":
        doc = {
            "artifact": "prclab",
            "version": version,
            "config": {k: config[k] for k in sorted(config)},
            "columns": list(columns),
            "rows": [list(row) for row in rows],
        }
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def write_rows(path, fmt, columns, rows, config, version):
    text = render_rows(fmt, columns, rows, config, version)
    with open(path, "w") as fh:
        fh.write(text)
    return text
