"""JSON encoding of families, reports, decomposition results and certificates.

Floats are written with Python's shortest round-trip ``repr``, so every
double survives ``dumps``/``loads`` bit-exactly.  NaN and Inf are rejected
on both sides.
"""

from __future__ import annotations

import json
from dataclasses import asdict

import numpy as np

from .decomp import (
    BlockSchedule,
    DecompositionResult,
    LedgerEntry,
    PerturbationCertificate,
)
from .errors import InputError
from .frames import SpectralReport
from .linops import VectorFamily


def _reject_constant(name):
    raise InputError(f"non-finite number {name} in JSON input")


def loads(text: str):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None


def dumps(doc) -> str:
    try:
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    except ValueError as exc:
        raise InputError(f"cannot encode non-finite number: {exc}") from None


def _number(x) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InputError(f"expected a number, got {x!r}")
    return float(x)


def family_to_dict(F: VectorFamily) -> dict:
    if F.scalars == "complex":
        vectors = [[[float(z.real), float(z.imag)] for z in row] for row in F.vectors]
    else:
        vectors = [[float(x) for x in row] for row in F.vectors]
    return {"dim": F.dim, "scalars": F.scalars, "vectors": vectors, "labels": list(F.labels)}


def family_from_dict(doc) -> VectorFamily:
    if not isinstance(doc, dict):
        raise InputError("family document must be a JSON object")
    for key in ("dim", "vectors"):
        if key not in doc:
            raise InputError(f"family document lacks {key!r}")
    dim = doc["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int):
        raise InputError(f"dim must be an integer, got {dim!r}")
    scalars = doc.get("scalars", "real")
    rows = doc["vectors"]
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise InputError("vectors must be an array of arrays")
    for i, row in enumerate(rows):
        if len(row) != dim:
            raise InputError(f"vector {i} has {len(row)} entries, expected {dim}")
    if scalars == "complex":
        data = np.zeros((len(rows), dim), dtype=np.complex128)
        for i, row in enumerate(rows):
            for j, z in enumerate(row):
                if not (isinstance(z, list) and len(z) == 2):
                    raise InputError(f"complex entry ({i},{j}) must be a [re, im] pair")
                data[i, j] = complex(_number(z[0]), _number(z[1]))
    elif scalars == "real":
        data = np.array([[_number(x) for x in row] for row in rows], dtype=np.float64)
    else:
        raise InputError(f"scalars must be 'real' or 'complex', got {scalars!r}")
    labels = doc.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or any(
                isinstance(x, bool) or not isinstance(x, int) for x in labels):
            raise InputError("labels must be an array of integers")
    return VectorFamily(dim, data.reshape(len(rows), dim), labels, scalars)


def report_to_dict(report: SpectralReport) -> dict:
    doc = asdict(report)
    doc["frame_ratio"] = report.frame_ratio if report.frame_A > 0 else None
    return {"kind": "spectral_report", "report": doc}


def report_from_dict(doc) -> SpectralReport:
    body = dict(doc["report"])
    body.pop("frame_ratio", None)
    return SpectralReport(**body)


def result_to_dict(result: DecompositionResult) -> dict:
    ledger = []
    for e in result.ledger:
        item = {"step": e.step, "kind": e.kind, "threshold": e.threshold, "achieved": e.achieved}
        if e.delta_k is not None:
            item["delta_k"] = e.delta_k
        ledger.append(item)
    return {
        "kind": "decomposition",
        "strategy": result.strategy,
        "epsilon": result.epsilon,
        "start_index": result.start_index,
        "allow_non_unit": result.allow_non_unit,
        "parts": [list(result.part_1), list(result.part_2)],
        "blocks": [[list(b) for b in result.blocks_1], [list(b) for b in result.blocks_2]],
        "cuts": list(result.schedule.cuts),
        "ledger": ledger,
        "energies": list(result.energies),
        "perturbed": [family_to_dict(result.perturbed_1), family_to_dict(result.perturbed_2)],
    }


def _int_list(x, what):
    if not isinstance(x, list) or any(isinstance(v, bool) or not isinstance(v, int) for v in x):
        raise InputError(f"{what} must be an array of integers")
    return tuple(x)


def result_from_dict(doc) -> DecompositionResult:
    if not isinstance(doc, dict) or doc.get("kind") != "decomposition":
        raise InputError("not a decomposition report")
    try:
        parts = [_int_list(p, "part") for p in doc["parts"]]
        blocks = [tuple(_int_list(b, "block") for b in bs) for bs in doc["blocks"]]
        ledger = []
        for item in doc["ledger"]:
            delta = item.get("delta_k")
            ledger.append(LedgerEntry(int(item["step"]), str(item["kind"]),
                                      _number(item["threshold"]), _number(item["achieved"]),
                                      None if delta is None else _number(delta)))
        schedule = BlockSchedule(_int_list(doc["cuts"], "cuts"), blocks[0], blocks[1],
                                 tuple(ledger))
        fams = [family_from_dict(f) for f in doc["perturbed"]]
        return DecompositionResult(
            strategy=str(doc["strategy"]),
            epsilon=_number(doc["epsilon"]),
            part_1=parts[0], part_2=parts[1],
            perturbed_1=fams[0], perturbed_2=fams[1],
            energies=tuple(_number(e) for e in doc["energies"]),
            schedule=schedule,
            start_index=int(doc.get("start_index", 1)),
            allow_non_unit=bool(doc.get("allow_non_unit", False)),
        )
    except (KeyError, IndexError, TypeError) as exc:
        raise InputError(f"malformed decomposition report: {exc!r}") from None


def certificate_to_dict(cert: PerturbationCertificate) -> dict:
    doc = asdict(cert)
    doc["block_ids"] = list(cert.block_ids)
    return {"kind": "certificate", **doc}
