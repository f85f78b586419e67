#!/usr/bin/env python3
"""Write raw CSVs and feature specs for the four benchmark datasets.

Sources are the UCI files bundled inside a few PyPI packages (keel_ds and
responsibly). Pass either a directory holding the unpacked packages or one
holding the wheel files themselves. Nursery is not bundled anywhere we can
reach, so its labels are synthesized over the full attribute product space.

Afterwards run `nn2rules prepare` on each pair (see --prepare).
"""

import argparse
import csv
import io
import itertools
import random
import subprocess
import sys
import zipfile
from pathlib import Path

SOURCES = {
    "car-good": ("keel_ds", "keel_ds/data/imbalanced/raw/car-good.dat"),
    "car-vgood": ("keel_ds", "keel_ds/data/imbalanced/raw/car-vgood.dat"),
    "contraceptive": ("keel_ds", "keel_ds/data/balanced/raw/contraceptive.dat"),
    "adult.data": ("responsibly", "responsibly/dataset/adult/adult.data"),
    "adult.test": ("responsibly", "responsibly/dataset/adult/adult.test"),
}


def read_source(root: Path, key: str) -> str:
    package, member = SOURCES[key]
    direct = root / member
    if direct.exists():
        return direct.read_text()
    for wheel in sorted(root.glob(f"{package}-*.whl")):
        with zipfile.ZipFile(wheel) as z:
            if member in z.namelist():
                return z.read(member).decode()
    sys.exit(f"cannot find {member} under {root}")


def data_lines(text: str):
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith(("@", "|")):
            yield [c.strip() for c in line.split(",")]


def write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_spec(path: Path, features):
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for name, values in features:
        if isinstance(values, int):
            lines.append(f"{name}: numeric, bins={values}")
        else:
            lines.append(f"{name}: {', '.join(values)}")
    path.write_text("\n".join(lines) + "\n")


# ---- cars ----------------------------------------------------------------

CAR_COLUMNS = ["buying", "maint", "doors", "persons", "lug_boot", "safety"]
CAR_FEATURES = [
    ("safety", ["low", "med", "high"]),
    ("lug_boot", ["small", "med", "big"]),
    ("doors", ["2", "3", "4", "5more"]),
    ("persons", ["2", "4", "more"]),
    ("maint", ["vhigh", "high", "med", "low"]),
    ("buying", ["vhigh", "high", "med", "low"]),
]


def cars(root: Path):
    good = {tuple(r[:6]): r[6] for r in data_lines(read_source(root, "car-good"))}
    vgood = {tuple(r[:6]): r[6] for r in data_lines(read_source(root, "car-vgood"))}
    assert good.keys() == vgood.keys() and len(good) == 1728
    order = [CAR_COLUMNS.index(name) for name, _ in CAR_FEATURES]
    rows = []
    for key in good:
        label = int(good[key] == "positive" or vgood[key] == "positive")
        rows.append([key[i] for i in order] + [label])
    return [n for n, _ in CAR_FEATURES] + ["label"], rows, CAR_FEATURES


# ---- nursery (synthetic labels) -------------------------------------------

NURSERY_FEATURES = [
    ("parents", ["usual", "pretentious", "great_pret"]),
    ("housing", ["convenient", "less_conv", "critical"]),
    ("social", ["nonprob", "slightly_prob", "problematic"]),
    ("has_nurs", ["proper", "less_proper", "improper", "critical", "very_crit"]),
    ("finance", ["convenient", "inconv"]),
    ("health", ["recommended", "priority", "not_recom"]),
    ("form", ["complete", "completed", "incomplete", "foster"]),
    ("children", ["1", "2", "3", "more"]),
]


def nursery_label(idx, rng: random.Random) -> int:
    parents, housing, social, has_nurs, finance, health, form, children = idx
    if health == 2:
        return 0
    score = (2 * health + parents + housing + social + 0.75 * has_nurs + finance
             + 0.5 * form + 0.5 * children)
    label = int(score >= 5.5)
    if rng.random() < 0.03:
        label = 1 - label
    return label


def nursery(_root: Path):
    rng = random.Random(12960)
    rows = []
    ranges = [range(len(v)) for _, v in NURSERY_FEATURES]
    for idx in itertools.product(*ranges):
        values = [NURSERY_FEATURES[f][1][i] for f, i in enumerate(idx)]
        rows.append(values + [nursery_label(idx, rng)])
    return [n for n, _ in NURSERY_FEATURES] + ["label"], rows, NURSERY_FEATURES


# ---- contraception --------------------------------------------------------

CMC_COLUMNS = ["wife_age", "wife_edu", "husband_edu", "num_children", "religion",
               "working", "husband_occ", "living", "media", "method"]
CMC_FEATURES = [
    ("wife_age", 3),
    ("religion", ["0", "1"]),
    ("wife_edu", ["1", "2", "3", "4"]),
    ("husband_edu", ["1", "2", "3", "4"]),
    ("num_children", 3),
    ("husband_occ", ["1", "2", "3", "4"]),
    ("working", ["0", "1"]),
    ("media", ["0", "1"]),
    ("living", ["1", "2", "3", "4"]),
]


def contraception(root: Path):
    rows = []
    for r in data_lines(read_source(root, "contraceptive")):
        rec = dict(zip(CMC_COLUMNS, r))
        rows.append([rec[n] for n, _ in CMC_FEATURES] + [int(rec["method"] != "1")])
    assert len(rows) == 1473
    return [n for n, _ in CMC_FEATURES] + ["label"], rows, CMC_FEATURES


# ---- adult ----------------------------------------------------------------

ADULT_COLUMNS = ["age", "workclass", "fnlwgt", "education", "education_num", "marital",
                 "occupation", "relationship", "race", "sex", "capital_gain",
                 "capital_loss", "hours_per_week", "native_country", "income"]

MARITAL = {
    "Married-civ-spouse": "married", "Married-AF-spouse": "married",
    "Married-spouse-absent": "married", "Never-married": "never_married",
    "Divorced": "previously_married", "Separated": "previously_married",
    "Widowed": "previously_married",
}
EDUCATION = {
    "Preschool": "elementary", "1st-4th": "elementary", "5th-6th": "elementary",
    "7th-8th": "elementary", "9th": "some_hs", "10th": "some_hs", "11th": "some_hs",
    "12th": "some_hs", "HS-grad": "hs_grad", "Some-college": "some_college",
    "Assoc-acdm": "assoc", "Assoc-voc": "assoc", "Bachelors": "bachelors",
    "Masters": "masters", "Prof-school": "doctorate_prof", "Doctorate": "doctorate_prof",
}
OCCUPATIONS = ["Adm-clerical", "Armed-Forces", "Craft-repair", "Exec-managerial",
               "Farming-fishing", "Handlers-cleaners", "Machine-op-inspct", "Other-service",
               "Priv-house-serv", "Prof-specialty", "Protective-serv", "Sales",
               "Tech-support", "Transport-moving"]
ADULT_FEATURES = [
    ("age", 3),
    ("capital_gain", 3),
    ("capital_loss", 3),
    ("hours_per_week", 3),
    ("marital", ["married", "never_married", "previously_married"]),
    ("occupation", OCCUPATIONS),
    ("sex", ["Female", "Male"]),
    ("education", ["elementary", "some_hs", "hs_grad", "some_college", "assoc",
                   "bachelors", "masters", "doctorate_prof"]),
    ("native_country", ["us", "non_us"]),
]


def adult(root: Path):
    rows = []
    dropped = 0
    for key in ("adult.data", "adult.test"):
        for r in data_lines(read_source(root, key)):
            if len(r) != len(ADULT_COLUMNS):
                continue
            if "?" in r:
                dropped += 1
                continue
            rec = dict(zip(ADULT_COLUMNS, r))
            rec["marital"] = MARITAL[rec["marital"]]
            rec["education"] = EDUCATION[rec["education"]]
            rec["native_country"] = "us" if rec["native_country"] == "United-States" else "non_us"
            label = int(rec["income"].rstrip(".") == ">50K")
            rows.append([rec[n] for n, _ in ADULT_FEATURES] + [label])
    print(f"adult: kept {len(rows)} rows, dropped {dropped} with missing values")
    return [n for n, _ in ADULT_FEATURES] + ["label"], rows, ADULT_FEATURES


DATASETS = {"cars": cars, "nursery": nursery, "contraception": contraception, "adult": adult}


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--source", default="/tmp/dl/x", type=Path,
                   help="directory with unpacked packages or their wheel files")
    p.add_argument("--data-root", default=Path(__file__).resolve().parent.parent / "data", type=Path)
    p.add_argument("--datasets", default=",".join(DATASETS))
    p.add_argument("--prepare", metavar="NN2RULES",
                   help="path to the nn2rules binary; runs `prepare` on each dataset")
    args = p.parse_args()

    for name in args.datasets.split(","):
        header, rows, features = DATASETS[name](args.source)
        raw = args.data_root / "raw" / f"{name}.csv"
        spec = args.data_root / "specs" / f"{name}.spec"
        write_csv(raw, header, rows)
        write_spec(spec, features)
        print(f"{name}: {len(rows)} rows -> {raw}")
        if args.prepare:
            subprocess.run([args.prepare, "prepare", "--raw", str(raw), "--spec", str(spec),
                            "--out", str(args.data_root / name)], check=True)


if __name__ == "__main__":
    main()
