"""Tables of known accessory parameters, with consistency checks.

The bundled catalog is a JSON list of rows::

    {"label": "1/15", "e": 3, "curve": {"a1": "1", ...},
     "expected_C": "-55/54", "target_squares": ["5", "16", "20"],
     "flags": [], "notes": "..."}

Coefficients use the curve module's encoding.  Target squares are stored
in a preferred order but are always matched up to permutation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path

import gmpy2

from .algebraic import AlgebraicNumber
from .curve import WeierstrassCurve, coefficient_to_json, coefficient_value, depress, parse_coefficient
from .errors import SchemaError
from .lame import LameOperator, truncation_order_for
from .monodromy import match_triple, monodromy_set
from .paths import build_loops
from .precision import PrecisionContext

INDICES = {3, 4, 5, 6, 7, 9, 11}
KNOWN_FLAGS = {"unverified-transcription", "complex-C", "from-external-source"}
UNVERIFIED = "unverified-transcription"
KEYS = {"label", "e", "curve", "expected_C", "target_squares", "flags", "notes"}


@dataclass(frozen=True)
class CatalogEntry:
    label: str
    e: int
    curve: WeierstrassCurve
    expected_C: object = None
    target_squares: tuple = ()
    flags: frozenset = field(default_factory=frozenset)
    notes: str = ""

    @property
    def key(self):
        """Labels repeat across indices (5/9, 49/1), so rows are keyed by both."""
        return f"{self.label}@e{self.e}"

    @property
    def verified(self):
        return UNVERIFIED not in self.flags

    def to_json(self):
        out = {"label": self.label, "e": self.e, "curve": self.curve.to_json()}
        if self.expected_C is not None:
            out["expected_C"] = coefficient_to_json(self.expected_C)
        out["target_squares"] = [coefficient_to_json(t) for t in self.target_squares]
        out["flags"] = sorted(self.flags)
        if self.notes:
            out["notes"] = self.notes
        return out

    @classmethod
    def from_json(cls, row, index=None):
        where = row.get("label", f"#{index}") if isinstance(row, dict) else f"#{index}"
        if not isinstance(row, dict):
            raise SchemaError("catalog row must be an object", where)
        unknown = set(row) - KEYS
        if unknown:
            raise SchemaError(f"unknown keys {sorted(unknown)}", where)
        for k in ("label", "e", "curve", "target_squares"):
            if k not in row:
                raise SchemaError(f"missing key {k!r}", where)
        label = row["label"]
        if not isinstance(label, str) or not label:
            raise SchemaError("label must be a non-empty string", where)
        e = row["e"]
        if isinstance(e, bool) or not isinstance(e, int) or e < 2:
            raise SchemaError(f"e must be an integer >= 2, got {e!r}", where)
        curve = WeierstrassCurve.from_json(row["curve"], where)
        C = row.get("expected_C")
        C = None if C is None else parse_coefficient(C, where)
        targets = row["target_squares"]
        if not isinstance(targets, list) or len(targets) != 3:
            raise SchemaError("target_squares must list three coefficients", where)
        targets = tuple(parse_coefficient(t, where) for t in targets)
        for t in targets:
            z = complex(t) if isinstance(t, AlgebraicNumber) else complex(float(t))
            if abs(z.imag) > 1e-12 * max(1.0, abs(z)) or z.real <= 0:
                raise SchemaError(f"target square {t} is not a positive real", where)
        flags = row.get("flags", [])
        if not isinstance(flags, list) or not all(isinstance(f, str) for f in flags):
            raise SchemaError("flags must be a list of strings", where)
        bad = set(flags) - KNOWN_FLAGS
        if bad:
            raise SchemaError(f"unknown flags {sorted(bad)}", where)
        notes = row.get("notes", "")
        return cls(label, e, curve, C, targets, frozenset(flags), notes)


def bundled_catalog_path():
    return Path(str(resources.files("lame_accessory") / "data" / "catalog.json"))


def load_catalog(path=None):
    """Entries of a catalog file (the bundled one by default).

    Raises
    ------
    SchemaError
        On malformed JSON or any invalid row; the message names the row.
    """
    path = Path(path) if path is not None else bundled_catalog_path()
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, list):
        raise SchemaError(f"{path}: catalog must be a JSON list")
    entries = [CatalogEntry.from_json(row, i) for i, row in enumerate(data)]
    seen = set()
    for entry in entries:
        if entry.key in seen:
            raise SchemaError("duplicate label for this index", entry.label)
        seen.add(entry.key)
        if entry.e not in INDICES and "from-external-source" not in entry.flags:
            raise SchemaError(f"e={entry.e} outside the tabulated indices", entry.label)
    return entries


def find_entry(entries, label, e=None):
    """The row with ``label`` (and index ``e`` when the label is ambiguous)."""
    hits = [x for x in entries if x.label == label and (e is None or x.e == e)]
    if not hits:
        raise KeyError(f"no catalog entry {label!r}" + (f" with e={e}" if e else ""))
    if len(hits) > 1:
        raise KeyError(f"label {label!r} is ambiguous; pass e (one of {sorted(x.e for x in hits)})")
    return hits[0]


def target_values(entry, ctx):
    return [coefficient_value(t, ctx).real for t in entry.target_squares]


def fricke_check(entry: CatalogEntry, ctx: PrecisionContext):
    """``|x^2+y^2+z^2 - xyz - (2 - 2cos(pi/e))|`` for the target square roots."""
    with ctx.scope():
        sq = target_values(entry, ctx)
        xs = [gmpy2.sqrt(s) for s in sq]
        lhs = sq[0] + sq[1] + sq[2] - xs[0] * xs[1] * xs[2]
        return abs(lhs - (2 - 2 * gmpy2.cos(gmpy2.const_pi() / entry.e)))


def operator_for(entry: CatalogEntry, ctx: PrecisionContext, C=None):
    cubic = depress(entry.curve, ctx)
    if C is None:
        C = entry.expected_C
    Cv = coefficient_value(C if C is not None else Fraction(0), ctx)
    return LameOperator(cubic, entry.e, Cv)


def verify_entry(entry: CatalogEntry, ctx: PrecisionContext, step_ratio=0.5, tol=None):
    """Monodromy at ``expected_C`` compared with the target triple.

    Returns ``(monodromy_set, match_report)``.
    """
    if entry.expected_C is None:
        raise ValueError(f"entry {entry.label} has no expected C")
    if ctx.series_order is None:
        order = truncation_order_for(operator_for(entry, ctx, Fraction(0)), step_ratio, ctx)
        ctx = replace(ctx, series_order=order)
    op = operator_for(entry, ctx)
    plan = build_loops(op.cubic, step_ratio=step_ratio, ctx=ctx)
    ms = monodromy_set(op, plan, ctx)
    if tol is None:
        tol = 10.0 ** (-(ctx.digits // 2))
    return ms, match_triple(ms, entry.target_squares, tol)
