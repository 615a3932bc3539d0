# -*- coding: utf-8 -*-
"""
CSV and JSON writers with fixed column sets per subcommand.
"""

import csv
import json
import math

BOUNDS_COLUMNS = ("a", "N", "rho", "A_est", "B_est", "ratio_A", "walnut_upper",
                  "b_lower_probe", "dual_lower", "conv_A_halfN",
                  "conv_A_smallrho", "condition", "instability", "error")

COLUMNS = {
    "bounds": BOUNDS_COLUMNS,
    "sweep": BOUNDS_COLUMNS,
    "extremal": ("a", "R", "n_R", "q_R", "p_R", "fock_norm_sq",
                 "lattice_norm_sq", "ratio", "ratio_over_gap", "defect_sup",
                 "tail_integral", "inner_sum", "outer_sum",
                 "min_centroid_clearance", "error"),
    "dual": ("a", "N", "rho", "A_est", "kappa_fit", "kappa_over_gap", "w_norm",
             "dual_lower", "envelope_lower", "reconstruction_error", "error"),
    "sigma-check": ("a", "eps", "test_radius", "rho_sigma", "sup_dev",
                    "inf_dev", "sup_dev_doubled", "inf_dev_doubled", "drift",
                    "error"),
    "selftest": ("suite", "status", "detail"),
}


def format_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def project(row, columns):
    return [row.get(column) for column in columns]


def write_csv(rows, columns, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(value) for value in project(row, columns)])


def write_json(rows, columns, stream, metadata=None):
    document = {
        "metadata": metadata or {},
        "rows": [dict((column, json_value(row.get(column)))
                      for column in columns) for row in rows],
    }
    json.dump(document, stream, indent=2)
    stream.write("\n")


def write_rows(rows, subcommand, fmt, stream, metadata=None):
    columns = COLUMNS[subcommand]
    if fmt == "json":
        write_json(rows, columns, stream, metadata)
    else:
        write_csv(rows, columns, stream)
