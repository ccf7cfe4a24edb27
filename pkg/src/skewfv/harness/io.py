"""CSV and JSON output of run artifacts."""
import csv
import json
import math
import os

import numpy as np

PROFILE_HEADERS = {
    "L1": ("s", "x", "y", "cell", "alpha", "alpha_exact"),
    "L2": ("s", "x", "y", "cell", "alpha", "alpha_exact"),
    "L3": ("x", "y", "cell", "c", "c_oracle"),
}


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])


def write_dict_rows(path, rows):
    if not rows:
        return
    header = list(rows[0])
    write_csv(path, header, [[r[k] for k in header] for r in rows])


def write_summary(path, summary):
    with open(path, "w") as fh:
        json.dump(_plain(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_artifacts(art, outdir, spec=None):
    """Profiles, extrema log, error table and summary.json; returns the paths written."""
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for name, rows in art.profiles.items():
        p = os.path.join(outdir, f"profile_{name}.csv")
        header = PROFILE_HEADERS.get(name, tuple(f"col{i}" for i in range(len(rows[0]))))
        write_csv(p, header, rows)
        paths.append(p)
    if art.log:
        p = os.path.join(outdir, "extrema_log.csv")
        write_dict_rows(p, art.log)
        paths.append(p)
    if art.table:
        p = os.path.join(outdir, "error_table.csv")
        write_dict_rows(p, art.table)
        paths.append(p)
    summary = dict(art.summary, kind=art.kind)
    if spec is not None:
        summary["case"] = spec.to_dict()
    p = os.path.join(outdir, "summary.json")
    write_summary(p, summary)
    paths.append(p)
    return paths
