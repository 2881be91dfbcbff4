"""Loading family configs and point sets; writing reports with a run manifest."""
from __future__ import annotations

import csv
import datetime as _dt
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .config import Configuration
from .potentials import FamilyError, PotentialFamily, paper_catalog, paper_example_family


class InputError(ValueError):
    pass


def parse_number(x):
    """Ints stay ints, ``"a/b"`` strings become Fractions, floats stay floats."""
    if isinstance(x, bool):
        raise InputError(f"not a number: {x!r}")
    if isinstance(x, (int, float)):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            raise InputError(f"not a number: {x!r}") from None
    raise InputError(f"not a number: {x!r}")


def family_from_dict(cfg: dict) -> PotentialFamily:
    kind = cfg.get("family", "inverse-power-sum")
    try:
        if kind == "inverse-power-sum":
            rows = cfg.get("per_p")
            if not rows:
                raise InputError("inverse-power-sum config needs a per_p list")
            rows = [{k: (int(r[k]) if k == "p" else parse_number(r[k]))
                     for k in ("p", "A", "B", "m", "n")} for r in rows]
            fam = PotentialFamily.from_rows(int(cfg.get("d", 1)), rows)
            if "p_max" in cfg and int(cfg["p_max"]) != fam.p_max:
                raise InputError(f"p_max={cfg['p_max']} but per_p runs to p={fam.p_max}")
            return fam
        b_scale = parse_number(cfg.get("b_scale", "1/2"))
        eps = parse_number(cfg.get("epsilon", 0.1))
        if kind == "paper-catalog":
            return paper_catalog(float(eps), int(cfg.get("p_max", 8)), int(cfg.get("d", 1)), b_scale)
        if kind == "paper-example":
            return paper_example_family(float(eps), b_scale)
    except KeyError as exc:
        raise InputError(f"missing field {exc.args[0]!r}") from None
    except FamilyError as exc:
        raise InputError(str(exc)) from None
    raise InputError(f"unknown family kind {kind!r}")


def load_family(path) -> PotentialFamily:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read family config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise InputError("family config must be a JSON object")
    return family_from_dict(cfg)


def load_points(path, d: int | None = None) -> Configuration:
    """CSV (one point per row) or JSON (``{"d", "points"}`` or a bare array of arrays)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read points {path}: {exc}") from None
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad JSON in {path}: {exc}") from None
        if isinstance(data, dict):
            if d is not None and "d" in data and int(data["d"]) != d:
                raise InputError(f"points file declares d={data['d']}, expected d={d}")
            d = int(data.get("d", d or 1))
            data = data.get("points", [])
        rows = [[float(v) for v in (r if isinstance(r, list) else [r])] for r in data]
    else:
        rows = [[float(v) for v in r] for r in csv.reader(
            line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#"))]
    if d is None:
        d = len(rows[0]) if rows else 1
    if any(len(r) != d for r in rows):
        raise InputError(f"every point needs {d} coordinates")
    arr = np.array(rows, dtype=np.float64).reshape(-1, d)
    try:
        return Configuration(arr, d)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _version():
    try:
        from importlib.metadata import version
        return version("superstab")
    except Exception:  # pragma: no cover
        return "0+unknown"


@dataclass
class RunManifest:
    command: str
    configs: dict = field(default_factory=dict)
    seed: int | None = None
    version: str = field(default_factory=_version)
    timestamp: str = field(
        default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))


def dumps(body: dict, manifest: RunManifest) -> str:
    return json.dumps({"manifest": asdict(manifest), "report": body}, indent=2, sort_keys=True)


def write_report(body: dict, manifest: RunManifest, out=None) -> None:
    """Write to ``out`` atomically (temp file then rename), or to stdout."""
    text = dumps(body, manifest) + "\n"
    if out is None or str(out) == "-":
        sys.stdout.write(text)
        return
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=out.parent, prefix=f".{out.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        os.unlink(tmp)
        raise
