"""JSON/CSV serialization. Complex numbers are ``{"re", "im"}`` in JSON and
paired ``_re``/``_im`` columns in CSV."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import fields, is_dataclass
from pathlib import Path
from typing import Iterable, List, Union

import numpy as np

from .ensemble import Classicality, EnsembleReport, HistorySpace
from .exceptions import InvalidInput
from .freeparticle import FreeParticleModel
from .thermo import ThermalReport

SWEEP_COLUMNS = [
    "n", "hbar", "lambda_re", "lambda_im", "lnZ_re", "lnZ_im", "EA_re", "EA_im",
    "Q_re", "Q_im", "Phi_re", "Phi_im",
]
LIMIT_COLUMNS = ["level", "regulator", "estimate_re", "estimate_im", "abs_error_vs_closed_form"]


def encode(obj):
    """Recursively convert to JSON-ready values."""
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real) + 0.0, "im": float(obj.imag) + 0.0}
    if isinstance(obj, float):
        return obj + 0.0
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item() + 0
    if isinstance(obj, np.ndarray):
        return [encode(v) for v in obj.tolist()]
    if isinstance(obj, Classicality):
        return {"lambda": encode(obj.lam), "hbar": obj.hbar}
    if isinstance(obj, HistorySpace):
        return obj.to_dict()
    if isinstance(obj, FreeParticleModel):
        return obj.to_dict()
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: encode(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    return obj


def decode_complex(value) -> complex:
    if isinstance(value, dict):
        return complex(float(value["re"]), float(value["im"]))
    return complex(value)


def dumps(obj) -> str:
    return json.dumps(encode(obj), indent=2) + "\n"


def report_dict(rep: EnsembleReport) -> dict:
    return {
        "log_Z": encode(rep.log_Z),
        "expected_action": encode(rep.expected_action),
        "quantropy": encode(rep.quantropy),
        "free_action": encode(rep.free_action),
        "lambda": encode(rep.lam.lam),
    }


def thermal_dict(rep: ThermalReport) -> dict:
    return {
        "log_Z": rep.log_Z,
        "expected_energy": rep.expected_energy,
        "entropy": rep.entropy,
        "free_energy": rep.free_energy,
        "beta": rep.beta,
    }


def parse_model(data) -> Union[HistorySpace, FreeParticleModel]:
    if not isinstance(data, dict):
        raise InvalidInput("model JSON must be an object")
    if "histories" in data:
        return HistorySpace.from_dict(data)
    if "n" in data:
        return FreeParticleModel.from_dict(data)
    raise InvalidInput("model JSON needs either a 'histories' list or a free-particle 'n'")


def load_model(source: str) -> Union[HistorySpace, FreeParticleModel]:
    """Read a model from a path, or from inline JSON if ``source`` starts with ``{``."""
    text = source if source.lstrip().startswith("{") else Path(source).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"model is not valid JSON: {exc}") from exc
    return parse_model(data)


def sweep_row(n, hbar, lam: complex, rep: EnsembleReport = None) -> dict:
    row = {"n": "" if n is None else n, "hbar": "" if hbar is None else hbar,
           "lambda_re": lam.real, "lambda_im": lam.imag}
    if rep is not None:
        for key, val in zip(("lnZ", "EA", "Q", "Phi"), rep.as_tuple()):
            row[f"{key}_re"] = val.real
            row[f"{key}_im"] = val.imag
    return row


def to_csv(rows: Iterable[dict], columns: List[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, restval="", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()
