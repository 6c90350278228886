"""Shared JSON schema.

* matrix: list of rows, each entry a 2-array [re, im]
* state: {"matrix": matrix}
* POVM: {"labels": [...], "elements": [matrix, ...]}
* channel: {"dim_in": n, "dim_out": m, "kraus": [matrix, ...]}
           or {"choi": matrix, "dim_in": n, "dim_out": m} (dims optional
           for a square Choi)
* frame input: {"povm": povm, "prior": state}
* frame dump: {"partition": [[labels]], "mppp": povm, "rdm_choi": matrix}

Readers reject non-conforming payloads with a diagnostic naming the file,
line (for JSON syntax errors) or field path (for shape errors).
"""

import json

import numpy as np

from .errors import SchemaError
from .linalg import DEFAULT_TOL, Tolerance
from .quantum import Channel, DensityMatrix, Povm


def load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError("file not found", location=str(path))
    except json.JSONDecodeError as exc:
        raise SchemaError(
            f"invalid JSON: {exc.msg}", location=f"{path}:{exc.lineno}:{exc.colno}"
        )


def _expect(condition: bool, message: str, where: str):
    if not condition:
        raise SchemaError(message, location=where)


def matrix_from_json(obj, where: str = "$") -> np.ndarray:
    _expect(isinstance(obj, list) and obj, "matrix must be a non-empty list of rows", where)
    dim = len(obj)
    out = np.empty((dim, dim), dtype=complex)
    for i, row in enumerate(obj):
        _expect(
            isinstance(row, list) and len(row) == dim,
            f"row {i} must have {dim} entries (square matrix)",
            f"{where}[{i}]",
        )
        for j, entry in enumerate(row):
            _expect(
                isinstance(entry, list)
                and len(entry) == 2
                and all(isinstance(v, (int, float)) for v in entry),
                "entry must be a 2-array [re, im]",
                f"{where}[{i}][{j}]",
            )
            out[i, j] = complex(entry[0], entry[1])
    return out


def matrix_to_json(mat: np.ndarray) -> list:
    m = np.asarray(mat, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def state_from_json(obj, where: str = "$", tol: Tolerance = DEFAULT_TOL) -> DensityMatrix:
    _expect(isinstance(obj, dict), "state must be an object", where)
    _expect("matrix" in obj, 'state needs a "matrix" field', where)
    return DensityMatrix(matrix_from_json(obj["matrix"], f"{where}.matrix"), tol)


def state_to_json(rho: DensityMatrix) -> dict:
    return {"matrix": matrix_to_json(rho.mat)}


def hamiltonian_from_json(obj, where: str = "$") -> np.ndarray:
    _expect(isinstance(obj, dict), "Hamiltonian must be an object", where)
    _expect("matrix" in obj, 'Hamiltonian needs a "matrix" field', where)
    return matrix_from_json(obj["matrix"], f"{where}.matrix")


def povm_from_json(obj, where: str = "$", tol: Tolerance = DEFAULT_TOL) -> Povm:
    _expect(isinstance(obj, dict), "POVM must be an object", where)
    for key in ("labels", "elements"):
        _expect(key in obj, f'POVM needs a "{key}" field', where)
    labels = obj["labels"]
    elements = obj["elements"]
    _expect(isinstance(labels, list), "labels must be a list", f"{where}.labels")
    _expect(
        isinstance(elements, list) and len(elements) == len(labels),
        "elements must be a list matching labels in length",
        f"{where}.elements",
    )
    mats = [
        matrix_from_json(e, f"{where}.elements[{i}]") for i, e in enumerate(elements)
    ]
    return Povm(mats, labels=labels, tol=tol)


def povm_to_json(povm: Povm) -> dict:
    return {
        "labels": list(povm.labels),
        "elements": [matrix_to_json(e) for _, e in povm],
    }


def channel_from_json(obj, where: str = "$") -> Channel:
    _expect(isinstance(obj, dict), "channel must be an object", where)
    if "kraus" in obj:
        for key in ("dim_in", "dim_out"):
            _expect(
                isinstance(obj.get(key), int),
                f'Kraus-form channel needs an integer "{key}"',
                where,
            )
        _expect(
            isinstance(obj["kraus"], list) and obj["kraus"],
            "kraus must be a non-empty list of matrices",
            f"{where}.kraus",
        )
        din, dout = obj["dim_in"], obj["dim_out"]
        ops = []
        for i, k in enumerate(obj["kraus"]):
            loc = f"{where}.kraus[{i}]"
            _expect(isinstance(k, list) and len(k) == dout, f"Kraus operator must have {dout} rows", loc)
            rows = []
            for r, row in enumerate(k):
                _expect(
                    isinstance(row, list) and len(row) == din,
                    f"Kraus row must have {din} entries",
                    f"{loc}[{r}]",
                )
                for c, entry in enumerate(row):
                    _expect(
                        isinstance(entry, list)
                        and len(entry) == 2
                        and all(isinstance(v, (int, float)) for v in entry),
                        "entry must be a 2-array [re, im]",
                        f"{loc}[{r}][{c}]",
                    )
                rows.append([complex(e[0], e[1]) for e in row])
            ops.append(np.array(rows))
        return Channel.from_kraus(ops, din, dout)
    if "choi" in obj:
        choi = matrix_from_json(obj["choi"], f"{where}.choi")
        if "dim_in" in obj or "dim_out" in obj:
            for key in ("dim_in", "dim_out"):
                _expect(
                    isinstance(obj.get(key), int),
                    f'Choi-form channel with explicit dims needs integer "{key}"',
                    where,
                )
            din, dout = obj["dim_in"], obj["dim_out"]
        else:
            side = int(round(np.sqrt(choi.shape[0])))
            _expect(
                side * side == choi.shape[0],
                "square-dims Choi matrix has non-square side; give dim_in/dim_out",
                f"{where}.choi",
            )
            din = dout = side
        return Channel.from_choi(choi, din, dout)
    raise SchemaError('channel needs a "kraus" or "choi" field', location=where)


def channel_to_json(channel: Channel) -> dict:
    return {
        "dim_in": channel.dim_in,
        "dim_out": channel.dim_out,
        "choi": matrix_to_json(channel.choi),
    }


def frame_input_from_json(obj, where: str = "$", tol: Tolerance = DEFAULT_TOL):
    """(Povm, DensityMatrix) from a {"povm": ..., "prior": ...} payload."""
    _expect(isinstance(obj, dict), "frame must be an object", where)
    for key in ("povm", "prior"):
        _expect(key in obj, f'frame needs a "{key}" field', where)
    return (
        povm_from_json(obj["povm"], f"{where}.povm", tol),
        state_from_json(obj["prior"], f"{where}.prior", tol),
    )
