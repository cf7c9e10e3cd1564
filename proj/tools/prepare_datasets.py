#!/usr/bin/env python3
"""Build the benchmark CSV + schema pairs under data/.

The raw files are taken from PyPI wheels that vendor copies of the UCI
datasets, so the only network access needed is a package index:

  responsibly  -> German credit, Adult
  keel-ds      -> Solar flare (flare-F), Mushroom
  rdatasets    -> DebTrivedi (AER::NMES1988), Coil-2000 (ISLR::Caravan)

Car evaluation and Nursery are not vendored by any package we know of; drop
`car.data` / `nursery.data` from the UCI repository into --raw-dir and they
are converted as well.

Usage: tools/prepare_datasets.py [--out data] [--raw-dir DIR]
"""

import argparse
import csv
import json
import pickle
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path


def fetch_wheel(package, dest):
    subprocess.run(
        [sys.executable, "-m", "pip", "download", package, "--no-deps", "-q", "-d", str(dest)],
        check=True,
    )
    name = package.replace("-", "_").lower()
    for whl in Path(dest).glob("*.whl"):
        if whl.name.lower().startswith(name):
            return zipfile.ZipFile(whl)
    raise FileNotFoundError(f"wheel for {package} not found in {dest}")


def write_pair(out, name, header, rows, schema):
    out.mkdir(parents=True, exist_ok=True)
    with open(out / f"{name}.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    with open(out / f"{name}.schema.json", "w", encoding="utf-8") as fh:
        json.dump(schema, fh, indent=2)
        fh.write("\n")
    print(f"{name}: {len(rows)} rows")


def nominal(name, cats):
    return {"name": name, "kind": "nominal", "categories": list(cats)}


def ordinal(name, cats):
    return {"name": name, "kind": "ordinal", "categories": list(cats)}


def continuous(name):
    return {"name": name, "kind": "continuous"}


def german(wheel, out):
    raw = wheel.read("responsibly/dataset/german/german.data").decode().split("\n")
    cat_defs = [
        (0, "status", [f"A1{i}" for i in range(1, 5)]),
        (2, "credit_history", [f"A3{i}" for i in range(0, 5)]),
        (3, "purpose", [f"A4{i}" for i in range(0, 11)]),
        (5, "savings", [f"A6{i}" for i in range(1, 6)]),
        (6, "employment", [f"A7{i}" for i in range(1, 6)]),
        (8, "personal_status", [f"A9{i}" for i in range(1, 6)]),
        (9, "other_debtors", [f"A10{i}" for i in range(1, 4)]),
        (11, "property", [f"A12{i}" for i in range(1, 5)]),
        (13, "installment_plans", [f"A14{i}" for i in range(1, 4)]),
        (14, "housing", [f"A15{i}" for i in range(1, 4)]),
        (16, "job", [f"A17{i}" for i in range(1, 5)]),
    ]
    cont_defs = [
        (1, "duration"), (4, "amount"), (7, "installment_rate"), (10, "residence_since"),
        (12, "age"), (15, "existing_credits"), (17, "dependents"),
    ]
    header = [n for _, n, _ in cat_defs] + [n for _, n in cont_defs] + ["telephone", "foreign_worker", "credit"]
    rows = []
    for line in raw:
        f = line.split()
        if not f:
            continue
        row = [f[i] for i, _, _ in cat_defs] + [f[i] for i, _ in cont_defs]
        row += ["1" if f[18] == "A192" else "0", "1" if f[19] == "A201" else "0"]
        row.append("good" if f[20] == "1" else "bad")
        rows.append(row)
    schema = {
        "predictors": [nominal(n, c) for _, n, c in cat_defs]
        + [continuous(n) for _, n in cont_defs]
        + [continuous("telephone"), continuous("foreign_worker")],
        "response": {"name": "credit", "type": "binary"},
    }
    write_pair(out, "german", header, rows, schema)


def solar(wheel, out):
    # KEEL's flare-F drops the modified Zurich class column and keeps only
    # "class F vs rest" as its label; it is carried here as a 0/1 predictor.
    raw = wheel.read("keel_ds/data/imbalanced/raw/flare-F.dat").decode().splitlines()
    header = ["spot_size", "spot_distribution", "evolution", "previous_activity",
              "activity", "historically_complex", "became_complex", "area", "zurich_f",
              "c_class_flares"]
    rows = []
    for line in raw:
        f = [x.strip() for x in line.split(",")]
        if len(f) < 12:
            continue
        rows.append([f[0], f[1], f[3], f[4], f[2], f[5], f[6], f[7],
                     "1" if f[11] == "positive" else "0", f[8]])
    schema = {
        "predictors": [
            nominal("spot_size", ["X", "R", "S", "A", "H", "K"]),
            nominal("spot_distribution", ["X", "O", "I", "C"]),
            ordinal("evolution", ["1", "2", "3"]),
            ordinal("previous_activity", ["1", "2", "3"]),
            continuous("activity"), continuous("historically_complex"),
            continuous("became_complex"), continuous("area"), continuous("zurich_f"),
        ],
        "response": {"name": "c_class_flares", "type": "binary"},
    }
    write_pair(out, "solar", header, rows, schema)


def mushroom(wheel, out):
    raw = wheel.read("keel_ds/data/balanced/raw/mushroom.dat").decode().splitlines()
    names = ["cap_shape", "cap_surface", "cap_color", "bruises", "odor", "gill_attachment",
             "gill_spacing", "gill_size", "gill_color", "stalk_shape", "stalk_root",
             "stalk_surface_above", "stalk_surface_below", "stalk_color_above",
             "stalk_color_below", "veil_type", "veil_color", "ring_number", "ring_type",
             "spore_print_color", "population", "habitat"]
    rows = [[x.strip() for x in l.split(",")] for l in raw if l.strip()]
    preds = []
    for i, n in enumerate(names):
        cats = sorted({r[i] for r in rows})
        if len(cats) < 2:
            continue
        preds.append(nominal(n, cats))
    keep = [i for i, n in enumerate(names) if any(p["name"] == n for p in preds)]
    header = [names[i] for i in keep] + ["edible"]
    rows = [[r[i] for i in keep] + [r[-1]] for r in rows]
    write_pair(out, "mushroom", header, rows,
               {"predictors": preds, "response": {"name": "edible", "type": "binary"}})


def adult(wheel, out):
    raw = wheel.read("responsibly/dataset/adult/adult.data").decode().splitlines()
    names = ["age", "workclass", "fnlwgt", "education", "education_num", "marital_status",
             "occupation", "relationship", "race", "sex", "capital_gain", "capital_loss",
             "hours_per_week", "native_country", "income"]
    education = ["Preschool", "1st-4th", "5th-6th", "7th-8th", "9th", "10th", "11th", "12th",
                 "HS-grad", "Some-college", "Assoc-voc", "Assoc-acdm", "Prof-school",
                 "Bachelors", "Masters", "Doctorate"]
    rows = []
    for l in raw:
        f = [x.strip() for x in l.split(",")]
        if len(f) != 15:
            continue
        rows.append(["Missing" if x == "?" else x for x in f])
    cat_idx = {1: "workclass", 5: "marital_status", 6: "occupation", 7: "relationship",
               8: "race", 9: "sex", 13: "native_country"}
    preds = [continuous("age")]
    for i, n in sorted(cat_idx.items()):
        preds.append(nominal(n, sorted({r[i] for r in rows})))
        if i == 1:
            preds.append(ordinal("education", education))
    preds += [continuous("capital_gain"), continuous("capital_loss"), continuous("hours_per_week")]
    order = [0, 1, 3, 5, 6, 7, 8, 9, 13, 10, 11, 12]
    header = [names[i] for i in order] + ["income"]
    rows = [[r[i] for i in order] + [r[14]] for r in rows]
    write_pair(out, "adult", header, rows,
               {"predictors": preds, "response": {"name": "income", "type": "binary"}})


def rdata(wheel, tmp, pkg, item):
    import pandas as pd
    path = f"rdatasets/_data/{pkg}/{item}.pkl.compress"
    target = Path(tmp) / f"{pkg}_{item}.pkl"
    target.write_bytes(wheel.read(path))
    for comp in ("zip", "gzip", "bz2", "xz", None):
        try:
            return pd.read_pickle(target, compression=comp)
        except Exception:
            continue
    with open(target, "rb") as fh:
        return pickle.load(fh)


def debtrivedi(wheel, tmp, out):
    df = rdata(wheel, tmp, "AER", "NMES1988")
    hosp = df["hospital"].clip(upper=4).astype(int).astype(str)
    chronic = df["chronic"].clip(upper=6).astype(int).astype(str)
    school = (df["school"] // 4).clip(upper=4).astype(int).astype(str)
    header = ["health", "hospital", "chronic", "region", "school", "age", "gender",
              "married", "income", "insurance", "visits"]
    rows = []
    for i in range(len(df)):
        r = df.iloc[i]
        rows.append([r["health"], hosp.iloc[i], chronic.iloc[i], r["region"], school.iloc[i],
                     f"{r['age']:g}", "1" if r["gender"] == "male" else "0",
                     "1" if r["married"] == "yes" else "0", f"{r['income']:g}",
                     "1" if r["insurance"] == "yes" else "0", str(int(r["visits"]))])
    schema = {
        "predictors": [
            ordinal("health", ["poor", "average", "excellent"]),
            ordinal("hospital", [str(i) for i in range(5)]),
            ordinal("chronic", [str(i) for i in range(7)]),
            nominal("region", sorted(df["region"].astype(str).unique())),
            ordinal("school", [str(i) for i in range(5)]),
            continuous("age"), continuous("gender"), continuous("married"),
            continuous("income"), continuous("insurance"),
        ],
        "response": {"name": "visits", "type": "count"},
    }
    write_pair(out, "debtrivedi", header, rows, schema)


def coil(wheel, tmp, out):
    df = rdata(wheel, tmp, "ISLR", "Caravan")
    cats = {"MOSTYPE": range(1, 42), "MGEMLEEF": range(1, 7), "MOSHOOFD": range(1, 11),
            "MRELGE": range(0, 10), "MKOOPKLA": range(1, 9)}
    present = {k: [str(v) for v in vals if (df[k] == v).any()] for k, vals in cats.items()}
    cont = [c for c in df.columns if c not in cats and c != "Purchase"]
    header = list(cats) + cont + ["Purchase"]
    rows = []
    for i in range(len(df)):
        r = df.iloc[i]
        rows.append([str(int(r[c])) for c in cats] + [f"{r[c]:g}" for c in cont] + [r["Purchase"]])
    schema = {
        "predictors": [nominal(k, v) for k, v in present.items()] + [continuous(c) for c in cont],
        "response": {"name": "Purchase", "type": "binary"},
    }
    write_pair(out, "coil2000", header, rows, schema)


CAR_COLS = [("buying", ["low", "med", "high", "vhigh"]), ("maint", ["low", "med", "high", "vhigh"]),
            ("doors", ["2", "3", "4", "5more"]), ("persons", ["2", "4", "more"]),
            ("lug_boot", ["small", "med", "big"]), ("safety", ["low", "med", "high"])]
CAR_SCHEMA = {"predictors": [ordinal(c, v) for c, v in CAR_COLS],
              "response": {"name": "class", "type": "binary"}}

NURSERY_COLS = [("parents", ["usual", "pretentious", "great_pret"]),
                ("has_nurs", ["proper", "less_proper", "improper", "critical", "very_crit"]),
                ("form", ["complete", "completed", "incomplete", "foster"]),
                ("children", ["1", "2", "3", "more"]),
                ("housing", ["convenient", "less_conv", "critical"]),
                ("finance", ["convenient", "inconv"]),
                ("social", ["nonprob", "slightly_prob", "problematic"]),
                ("health", ["recommended", "priority", "not_recom"])]
# finance has two levels and enters as a 0/1 continuous column.
NURSERY_SCHEMA = {"predictors": [ordinal(c, v) if c != "finance" else continuous(c) for c, v in NURSERY_COLS],
                  "response": {"name": "class", "type": "binary"}}


def write_schema(out, name, schema):
    out.mkdir(parents=True, exist_ok=True)
    with open(out / f"{name}.schema.json", "w", encoding="utf-8") as fh:
        json.dump(schema, fh, indent=2)
        fh.write("\n")


def car_from_raw(raw_dir, out):
    path = Path(raw_dir) / "car.data"
    if not path.exists():
        print("car: car.data not found in raw dir, skipped")
        return
    rows = [l.strip().split(",") for l in path.read_text().splitlines() if l.strip()]
    write_pair(out, "car", [c for c, _ in CAR_COLS] + ["class"], rows, CAR_SCHEMA)


def nursery_from_raw(raw_dir, out):
    path = Path(raw_dir) / "nursery.data"
    if not path.exists():
        print("nursery: nursery.data not found in raw dir, skipped")
        return
    rows = [l.strip().split(",") for l in path.read_text().splitlines() if l.strip()]
    rows = [r[:5] + ["1" if r[5] == "inconv" else "0"] + r[6:] for r in rows]
    write_pair(out, "nursery", [c for c, _ in NURSERY_COLS] + ["class"], rows, NURSERY_SCHEMA)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--raw-dir", default=None, help="directory holding car.data / nursery.data")
    args = ap.parse_args()
    out = Path(args.out)
    with tempfile.TemporaryDirectory() as tmp:
        resp = fetch_wheel("responsibly", tmp)
        keel = fetch_wheel("keel-ds", tmp)
        rds = fetch_wheel("rdatasets", tmp)
        german(resp, out)
        solar(keel, out)
        mushroom(keel, out)
        adult(resp, out)
        debtrivedi(rds, tmp, out)
        coil(rds, tmp, out)
    # The schemas are fixed by the UCI documentation; the rows need the raw files.
    write_schema(out, "car", CAR_SCHEMA)
    write_schema(out, "nursery", NURSERY_SCHEMA)
    if args.raw_dir:
        car_from_raw(args.raw_dir, out)
        nursery_from_raw(args.raw_dir, out)


if __name__ == "__main__":
    main()
