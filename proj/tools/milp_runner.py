#!/usr/bin/env python3
"""Reference MILP runner: solves a free-format MPS model and writes a
plain-text solution file.

Usage:
  milp_runner.py solve MODEL.mps OUT.sol [--time-limit S] [--rel-gap G]
                 [--seed N] [--threads N] [--relax]
  milp_runner.py serve

Serve mode reads lines of the form
  SOLVE <model> <solution> <time_limit> <rel_gap> <seed> <threads> <relax01>
from stdin and answers "DONE <solution>" or "ERR <message>" per request.

Solution file format: '#'-prefixed metadata lines (status, objective,
bound, time_total, time_to_best, message) followed by "name value" lines,
one per variable.
"""

import sys
import time

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

INF = float("inf")


class ModelError(Exception):
    pass


def parse_mps(path):
    """Parses the free MPS dialect used by this project (sections NAME,
    ROWS, COLUMNS with INTORG/INTEND markers, RHS, BOUNDS, ENDATA)."""
    obj_row = None
    row_sense = {}
    row_order = []
    col_names = []
    col_index = {}
    integrality = []
    lower = []
    upper = []
    entries = []        # (row_name or None for objective, col, coeff)
    rhs = {}
    obj_offset = 0.0
    section = None
    in_integer = False

    def ensure_col(name):
        if name in col_index:
            return col_index[name]
        col_index[name] = len(col_names)
        col_names.append(name)
        integrality.append(1 if in_integer else 0)
        lower.append(0.0)
        upper.append(INF)
        return col_index[name]

    with open(path, "r") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line or line[0] == "*":
                continue
            toks = line.split()
            if not toks:
                continue
            if line[0] not in " \t":
                head = toks[0]
                if head in ("NAME",):
                    section = None
                elif head in ("ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"):
                    section = head
                elif head == "RANGES":
                    raise ModelError("RANGES sections are not supported")
                elif head == "SOS":
                    raise ModelError(
                        "model carries SOS sets; lower them to big-M form "
                        "before handing the file to this backend")
                else:
                    raise ModelError(f"unknown section '{head}' (line {lineno})")
                continue
            if section == "ROWS":
                tag, name = toks[0], toks[1]
                if tag == "N":
                    if obj_row is not None:
                        raise ModelError("multiple objective rows")
                    obj_row = name
                elif tag in ("L", "G", "E"):
                    row_sense[name] = tag
                    row_order.append(name)
                else:
                    raise ModelError(f"bad row tag '{tag}' (line {lineno})")
            elif section == "COLUMNS":
                if len(toks) >= 3 and toks[1] == "'MARKER'":
                    if toks[2] == "'INTORG'":
                        in_integer = True
                    elif toks[2] == "'INTEND'":
                        in_integer = False
                    else:
                        raise ModelError(f"bad marker (line {lineno})")
                    continue
                if len(toks) < 3 or len(toks) % 2 == 0:
                    raise ModelError(f"malformed COLUMNS line {lineno}")
                j = ensure_col(toks[0])
                for k in range(1, len(toks) - 1, 2):
                    entries.append((toks[k], j, float(toks[k + 1])))
            elif section == "RHS":
                if len(toks) < 3 or len(toks) % 2 == 0:
                    raise ModelError(f"malformed RHS line {lineno}")
                for k in range(1, len(toks) - 1, 2):
                    name, value = toks[k], float(toks[k + 1])
                    if name == obj_row:
                        obj_offset = -value
                    else:
                        rhs[name] = value
            elif section == "BOUNDS":
                kind = toks[0]
                j = ensure_col(toks[2])
                if kind == "BV":
                    integrality[j] = 1
                    lower[j], upper[j] = 0.0, 1.0
                elif kind == "FR":
                    lower[j], upper[j] = -INF, INF
                elif kind == "MI":
                    lower[j] = -INF
                elif kind == "UP":
                    upper[j] = float(toks[3])
                elif kind == "LO":
                    lower[j] = float(toks[3])
                elif kind == "FX":
                    lower[j] = upper[j] = float(toks[3])
                else:
                    raise ModelError(f"unsupported bound '{kind}' (line {lineno})")
            elif section in (None, "ENDATA"):
                pass
    if section != "ENDATA":
        raise ModelError("missing ENDATA")

    ncols = len(col_names)
    c = np.zeros(ncols)
    rindex = {name: i for i, name in enumerate(row_order)}
    coo_r, coo_c, coo_v = [], [], []
    for row, j, coeff in entries:
        if row == obj_row:
            c[j] += coeff
        elif row in rindex:
            coo_r.append(rindex[row])
            coo_c.append(j)
            coo_v.append(coeff)
        else:
            raise ModelError(f"entry references unknown row '{row}'")

    nrows = len(row_order)
    A = sparse.coo_matrix((coo_v, (coo_r, coo_c)), shape=(nrows, ncols)).tocsr()
    cl = np.empty(nrows)
    cu = np.empty(nrows)
    for name, i in rindex.items():
        b = rhs.get(name, 0.0)
        tag = row_sense[name]
        cl[i] = -INF if tag == "L" else b
        cu[i] = INF if tag == "G" else b
    return {
        "c": c,
        "A": A,
        "cl": cl,
        "cu": cu,
        "integrality": np.array(integrality),
        "lower": np.array(lower, dtype=float),
        "upper": np.array(upper, dtype=float),
        "names": col_names,
        "offset": obj_offset,
    }


def solve_model(model_path, solution_path, time_limit, rel_gap, seed, threads, relax):
    del seed, threads  # deterministic single-thread backend; recorded upstream
    t0 = time.monotonic()
    mdl = parse_mps(model_path)
    integrality = mdl["integrality"].copy()
    if relax:
        integrality[:] = 0
    constraints = None
    if mdl["A"].shape[0] > 0:
        constraints = LinearConstraint(mdl["A"], mdl["cl"], mdl["cu"])
    options = {"time_limit": float(time_limit), "mip_rel_gap": float(rel_gap)}
    res = milp(
        c=mdl["c"],
        constraints=constraints,
        integrality=integrality,
        bounds=Bounds(mdl["lower"], mdl["upper"]),
        options=options,
    )
    elapsed = time.monotonic() - t0

    lines = []
    if res.status == 0:
        status = "optimal"
    elif res.status == 1 and res.x is not None:
        status = "feasible-timeout"
    elif res.status == 2:
        status = "infeasible"
    else:
        status = "error"
    lines.append(f"# status {status}")
    if res.x is not None:
        objective = float(res.fun) + mdl["offset"]
        bound = res.mip_dual_bound
        if bound is None or not np.isfinite(bound):
            bound = float(res.fun) if res.status == 0 else -INF
        else:
            bound = float(bound)
        if res.status == 0 and bound > objective - mdl["offset"]:
            bound = objective - mdl["offset"]  # clamp tiny gap overshoot
        if bound != -INF:
            bound += mdl["offset"]
        lines.append(f"# objective {float(objective)!r}")
        lines.append(f"# bound {float(bound)!r}")
    elif status == "error":
        lines.append(f"# message {getattr(res, 'message', 'solver failure')}")
    lines.append(f"# time_total {float(elapsed)!r}")
    # scipy gives no incumbent callback; time-to-best is the full solve time.
    lines.append(f"# time_to_best {float(elapsed)!r}")
    if res.x is not None:
        for name, value in zip(mdl["names"], res.x):
            lines.append(f"{name} {float(value)!r}")
    with open(solution_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def serve():
    for raw in sys.stdin:
        line = raw.strip()
        if not line:
            continue
        if line in ("QUIT", "EXIT"):
            break
        toks = line.split()
        try:
            if toks[0] != "SOLVE" or len(toks) != 8:
                raise ModelError("bad request; expected SOLVE with 7 arguments")
            _, model, solution, tl, gap, seed, threads, relax = toks
            solve_model(model, solution, float(tl), float(gap), int(seed),
                        int(threads), relax == "1")
            sys.stdout.write(f"DONE {solution}\n")
        except Exception as exc:  # report, keep serving
            msg = str(exc).replace("\n", " ")
            sys.stdout.write(f"ERR {msg}\n")
        sys.stdout.flush()


def main(argv):
    if len(argv) >= 2 and argv[1] == "serve":
        serve()
        return 0
    if len(argv) < 4 or argv[1] != "solve":
        sys.stderr.write(__doc__)
        return 2
    model, solution = argv[2], argv[3]
    time_limit, rel_gap, seed, threads, relax = 7200.0, 0.0, 0, 1, False
    i = 4
    while i < len(argv):
        arg = argv[i]
        if arg == "--time-limit":
            time_limit = float(argv[i + 1]); i += 2
        elif arg == "--rel-gap":
            rel_gap = float(argv[i + 1]); i += 2
        elif arg == "--seed":
            seed = int(argv[i + 1]); i += 2
        elif arg == "--threads":
            threads = int(argv[i + 1]); i += 2
        elif arg == "--relax":
            relax = True; i += 1
        elif arg == "":
            i += 1
        else:
            sys.stderr.write(f"unknown argument: {arg}\n")
            return 2
    try:
        solve_model(model, solution, time_limit, rel_gap, seed, threads, relax)
    except Exception as exc:
        with open(solution, "w") as fh:
            fh.write("# status error\n")
            fh.write(f"# message {str(exc)}".replace("\n", " ") + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
