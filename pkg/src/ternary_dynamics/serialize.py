"""CSV and JSON emission for trajectories, reports, sweep tables and diagnostics.

Floats are written as the shortest decimal that parses back to the exact
same double, so emitted files round-trip losslessly and identical runs
produce byte-identical output.  CSV uses comma separators, ``\\n`` line
endings and minimal quoting; JSON mirrors each table as a list of objects
keyed by the column names.
"""

import csv
import io
import json


def format_float(value):
    return repr(float(value))


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return format_float(value)


def csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def json_text(payload):
    return json.dumps(payload, indent=2) + "\n"


TRAJECTORY_HEADER = ["k", "p0", "p1", "p2"]


def trajectory_to_csv(states):
    return csv_text(
        TRAJECTORY_HEADER,
        [[k, s.p0, s.p1, s.p2] for k, s in enumerate(states)],
    )


def trajectory_to_json(states):
    return json_text([
        {"k": k, "p0": s.p0, "p1": s.p1, "p2": s.p2} for k, s in enumerate(states)
    ])


EQUILIBRIUM_HEADER = ["rho0", "rho1", "rho2", "v", "v_bar", "flags"]


def _equilibrium_fields(eq, flags):
    v0, v1, v2 = eq.params
    v_bar = eq.v_bar if v0 != 0.0 and v1 != 0.0 and v2 != 0.0 else None
    return [eq.rho0, eq.rho1, eq.rho2, eq.v_denominator, v_bar, list(flags)]


def equilibrium_to_csv(eq, flags=()):
    fields = _equilibrium_fields(eq, flags)
    fields[-1] = ";".join(flags)
    return csv_text(EQUILIBRIUM_HEADER, [fields])


def equilibrium_to_json(eq, flags=()):
    return json_text(dict(zip(EQUILIBRIUM_HEADER, _equilibrium_fields(eq, flags))))


CLASSIFICATION_HEADER = [
    "coordinate", "scenario", "rho_m", "v_m", "predicted_limit", "contraction_factor", "flags",
]


def _classification_fields(report, predicted, flags):
    return [
        report.coordinate,
        report.scenario.value,
        report.rho_m,
        report.v_m,
        predicted,
        report.contraction_factor,
        list(flags),
    ]


def classification_to_csv(report, predicted, flags=()):
    fields = _classification_fields(report, predicted, flags)
    fields[-1] = ";".join(flags)
    return csv_text(CLASSIFICATION_HEADER, [fields])


def classification_to_json(report, predicted, flags=()):
    return json_text(dict(zip(CLASSIFICATION_HEADER, _classification_fields(report, predicted, flags))))


SWEEP_HEADER = [
    "v0", "v1", "v2", "coordinate", "rho_m", "v_m", "scenario", "predicted_limit",
    "contraction_factor", "simulated_limit", "agreement", "flags",
]


def _sweep_fields(row):
    return [
        row.v0, row.v1, row.v2, row.coordinate, row.rho_m, row.v_m, row.scenario,
        row.predicted_limit, row.contraction_factor, row.simulated_limit, row.agreement,
        list(row.flags),
    ]


def sweep_to_csv(rows):
    table = []
    for row in rows:
        fields = _sweep_fields(row)
        fields[-1] = ";".join(row.flags)
        table.append(fields)
    return csv_text(SWEEP_HEADER, table)


def sweep_to_json(rows):
    return json_text([dict(zip(SWEEP_HEADER, _sweep_fields(row))) for row in rows])


REPLICATION_HEADER = ["replication", "k", "p0", "p1", "p2"]


def replications_to_csv(trajectories):
    table = []
    for traj in trajectories:
        for k, point in enumerate(traj.points):
            table.append([traj.replication, k, point[0], point[1], point[2]])
    return csv_text(REPLICATION_HEADER, table)


def replications_to_json(trajectories):
    payload = []
    for traj in trajectories:
        for k, point in enumerate(traj.points):
            payload.append({
                "replication": traj.replication, "k": k,
                "p0": point[0], "p1": point[1], "p2": point[2],
            })
    return json_text(payload)


DEVIATION_HEADER = ["n", "median_max_deviation", "replications"]


def deviation_table_to_csv(rows):
    return csv_text(
        DEVIATION_HEADER,
        [[r.sample_volume, r.median_max_deviation, r.replications] for r in rows],
    )


def deviation_table_to_json(rows):
    return json_text([
        {"n": r.sample_volume, "median_max_deviation": r.median_max_deviation,
         "replications": r.replications}
        for r in rows
    ])
