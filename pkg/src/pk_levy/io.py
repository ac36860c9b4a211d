"""Model/spec files (JSON, schema-checked) and CSV sample export."""
from __future__ import annotations

import csv
import json
import math
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .converse import ExcessSpec
from .decomposition import SampleBatch
from .errors import ConfigError
from .model import LevyModel, ValidatedModel, validate


def _schema(name: str) -> dict:
    text = resources.files("pk_levy").joinpath("schemas", name).read_text()
    return json.loads(text)


def check_schema(data, name: str) -> None:
    try:
        jsonschema.validate(data, _schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{name}: {where}: {exc.message}") from None


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from None


def parse_model(data: dict) -> ValidatedModel:
    check_schema(data, "model.schema.json")
    return validate(LevyModel.from_dict(data))


def read_model(path) -> ValidatedModel:
    return parse_model(load_json(path))


def read_spec(path) -> ExcessSpec:
    data = load_json(path)
    check_schema(data, "excess_spec.schema.json")
    return ExcessSpec.from_dict(data)


def write_model(path, model: ValidatedModel | LevyModel) -> None:
    if isinstance(model, ValidatedModel):
        model = model.model
    Path(path).write_text(json.dumps(model.to_dict(), indent=2) + "\n")


def fmt(value: float) -> str:
    """Shortest decimal that round-trips the double exactly (at most 17 digits)."""
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def write_csv(path, header: tuple[str, ...], columns) -> None:
    """Write columns as CSV; ``path`` of None or ``"-"`` means stdout."""
    if path in (None, "-"):
        _write_rows(sys.stdout, header, columns)
        return
    with open(path, "w", newline="") as fh:
        _write_rows(fh, header, columns)


def _write_rows(fh, header, columns) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in zip(*columns):
        writer.writerow([r if isinstance(r, (int, np.integer)) else fmt(r) for r in row])


def meta_path(path) -> Path:
    return Path(path).with_suffix(".meta")


def write_batch(path, batch: SampleBatch) -> Path:
    """Write ``index,value`` rows and a JSON ``.meta`` sidecar; returns the sidecar path."""
    write_csv(path, ("index", "value"), (range(batch.n), batch.values))
    meta = {"seed": batch.seed, "n": batch.n, "model_digest": batch.model_digest, **batch.meta}
    # strict JSON has no infinity literal
    meta = {k: fmt(v) if isinstance(v, float) and math.isinf(v) else v for k, v in meta.items()}
    side = meta_path(path)
    side.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return side


def read_batch(path) -> SampleBatch:
    values = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["index", "value"]:
            raise ConfigError(f"{path}: expected header index,value, got {','.join(header)}")
        for row in reader:
            values.append(float(row[1]))
    side = meta_path(path)
    meta = json.loads(side.read_text()) if side.exists() else {}
    seed = int(meta.pop("seed", 0))
    digest = str(meta.pop("model_digest", ""))
    meta.pop("n", None)
    return SampleBatch(np.asarray(values), seed, digest, len(values), meta)
