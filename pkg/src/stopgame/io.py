"""JSON instance loading and report serialization."""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path

from .errors import ValidationError
from .filtered_space import RATIONAL, build_space
from .payoff import build_payoff

BUILTIN_PREFIX = "builtin:"


def scalar(x):
    """JSON-friendly scalar: exact rationals become ``"a/b"`` strings."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return x
    return x


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return scalar(obj)


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2) + "\n"


def load_instance(path: str, mode: str = RATIONAL):
    """Return ``(name, payoff)`` for a JSON file or a ``builtin:<name>`` fixture.

    The file holds the space (``grid``, ``nodes``) and a ``payoff`` object.
    """
    if path.startswith(BUILTIN_PREFIX):
        from .fixtures import builtin_fixtures

        name = path[len(BUILTIN_PREFIX):]
        fixtures = builtin_fixtures(mode)
        aliases = {"cex": "CEX/abs_diff_f"}
        key = aliases.get(name.lower(), name)
        if key not in fixtures:
            raise ValidationError(f"unknown builtin {name!r}; have {sorted(fixtures)}")
        return key, fixtures[key]
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
    if "payoff" not in data:
        raise ValidationError(f"{path}: instance has no 'payoff'")
    space = build_space(data, mode)
    return Path(path).stem, build_payoff(space, data["payoff"])


def family_arrays(fams: dict) -> dict:
    return {name: list(f.values) for name, f in fams.items()}


def labels(st) -> list:
    """Stopping time as a per-node 0/1 STOP array."""
    return [int(x) for x in st.labels]


def csv_rows(instance: str, quantities: dict, mode: str, witnesses: dict | None = None) -> list:
    rows = []
    for q, v in quantities.items():
        if v is None:
            continue
        if isinstance(v, Fraction):
            num, den = v.numerator, v.denominator
        elif isinstance(v, int):
            num, den = v, 1
        else:
            num, den = repr(float(v)), 1
        wid = (witnesses or {}).get(q, "")
        rows.append({"instance": instance, "quantity": q, "value_num": num,
                     "value_den": den, "mode": mode, "witness_id": wid})
    return rows


CSV_COLUMNS = ["instance", "quantity", "value_num", "value_den", "mode", "witness_id"]


def to_csv(rows: list, columns=CSV_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for r in rows:
        writer.writerow(r)
    return buf.getvalue()
