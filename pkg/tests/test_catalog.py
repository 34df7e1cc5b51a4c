import json
from fractions import Fraction

import pytest
from gmpy2 import mpfr

from lame_accessory.catalog import (INDICES, UNVERIFIED, CatalogEntry, bundled_catalog_path, find_entry,
                                    fricke_check, load_catalog, verify_entry)
from lame_accessory.errors import SchemaError
from lame_accessory.precision import PrecisionContext

ROW = {"label": "1/15", "e": 3, "curve": {"a1": "1", "a2": "1", "a3": "1", "a4": "-135", "a6": "-660"},
       "expected_C": "-55/54", "target_squares": ["5", "16", "20"], "flags": []}


def write(tmp_path, rows):
    path = tmp_path / "cat.json"
    path.write_text(json.dumps(rows), encoding="utf-8")
    return path


def test_bundled_catalog(catalog):
    assert bundled_catalog_path().is_file()
    assert len(catalog) >= 40
    assert {x.e for x in catalog} == INDICES
    row = find_entry(catalog, "1/15")
    assert row.e == 3 and row.expected_C == Fraction(-55, 54)
    assert row.target_squares == (5, 16, 20)


def test_find_entry_ambiguity(catalog):
    with pytest.raises(KeyError, match="ambiguous"):
        find_entry(catalog, "5/9")
    assert find_entry(catalog, "5/9", 5).expected_C == Fraction(3, 100)
    with pytest.raises(KeyError):
        find_entry(catalog, "no/such")


def test_json_round_trip(catalog):
    for x in catalog:
        assert CatalogEntry.from_json(json.loads(json.dumps(x.to_json()))) == x


@pytest.mark.parametrize("mutate, message", [
    (lambda r: r["curve"].update(a4="-13x5"), "malformed coefficient"),
    (lambda r: r.update(flags=["typo"]), "unknown flags"),
    (lambda r: r.update(colour="red"), "unknown keys"),
    (lambda r: r.update(target_squares=["5", "16"]), "three"),
    (lambda r: r.update(target_squares=["5", "-16", "20"]), "positive"),
    (lambda r: r.pop("curve"), "missing key"),
    (lambda r: r.update(e=1), "e must be"),
    (lambda r: r.update(e=8), "outside the tabulated"),
])
def test_schema_errors_name_the_row(tmp_path, mutate, message):
    row = json.loads(json.dumps(ROW))
    mutate(row)
    with pytest.raises(SchemaError, match=message) as info:
        load_catalog(write(tmp_path, [row]))
    assert "1/15" in str(info.value)


def test_duplicates_and_bad_json(tmp_path):
    with pytest.raises(SchemaError, match="duplicate"):
        load_catalog(write(tmp_path, [ROW, ROW]))
    other = dict(ROW, e=4)
    assert len(load_catalog(write(tmp_path, [ROW, other]))) == 2
    path = tmp_path / "broken.json"
    path.write_text("[{", encoding="utf-8")
    with pytest.raises(SchemaError, match="invalid JSON"):
        load_catalog(path)
    external = dict(ROW, e=8, flags=["from-external-source"])
    assert load_catalog(write(tmp_path, [external]))[0].e == 8


def test_fricke_examples(entry):
    ctx = PrecisionContext(digits=40)
    assert fricke_check(entry("1/15"), ctx) < mpfr(10) ** -40
    assert fricke_check(entry("49/1", 7), ctx) < ctx.tolerance()
    bent = CatalogEntry.from_json(dict(ROW, target_squares=["5", "16", "21"]))
    assert abs(float(fricke_check(bent, ctx)) - (41 - 1680 ** 0.5)) < 1e-12


def test_flagged_rows_carry_notes(catalog):
    for x in catalog:
        if UNVERIFIED in x.flags:
            assert x.notes


# the master regression: monodromy at the stored C reproduces the stored triple
@pytest.mark.parametrize("key", [x.key for x in load_catalog()])
def test_entry_monodromy(catalog, key):
    x = next(y for y in catalog if y.key == key)
    ctx = PrecisionContext(digits=40)
    ms, rep = verify_entry(x, ctx)
    if x.key == "21/3@e3":
        # no embedding of the printed generator reproduces this row; kept flagged
        assert UNVERIFIED in x.flags and not rep.matched
        return
    assert rep.matched, f"{x.key}: error {rep.max_error:.2e}"
    assert ms.digits_est >= 25
