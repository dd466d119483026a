#!/usr/bin/env python3
"""Run each JSON-emitting subcommand and validate its output against schemas/."""
import json
import os
import subprocess
import sys
import tempfile

import jsonschema

cli, schema_dir = sys.argv[1], sys.argv[2]

RUNS = [
    ("constants", ["constants", "--n", "1000", "--v", "2"]),
    ("tail", ["tail", "--n", "50", "--v", "1", "--j", "1,50", "--points", "5"]),
    ("cdf", ["cdf", "--n", "1e6", "--v", "0", "--points", "11"]),
    ("dist", ["dist", "--n", "1e5", "--v", "0"]),
    ("sweep", ["sweep", "--v", "0", "--n-grid", "1e5,1e6"]),
    ("sample", ["sample", "--n", "8", "--v", "1", "--count", "30", "--seed", "3", "--source", "matrix"]),
    ("sample", ["sample", "--n", "8", "--v", "1", "--count", "30", "--seed", "3", "--scale", "x_n"]),
    ("validate", ["validate", "--n", "6", "--v", "0", "--count", "200", "--seed", "7"]),
    ("specfun-check", ["specfun-check"]),
]

failed = 0
for name, args in RUNS:
    schema = json.load(open(os.path.join(schema_dir, name + ".schema.json")))
    r = subprocess.run([cli, "--workers", "1", "--format", "json"] + args, capture_output=True, text=True)
    try:
        jsonschema.validate(json.loads(r.stdout), schema)
        print("ok  ", name, " ".join(args[1:]))
    except Exception as e:  # noqa: BLE001
        failed += 1
        print("FAIL", name, " ".join(args[1:]), "exit", r.returncode, r.stderr.strip(), str(e)[:300])

with tempfile.TemporaryDirectory() as d:
    out = os.path.join(d, "batch.csv")
    subprocess.run([cli, "--workers", "1", "--output", out, "sample", "--n", "8", "--count", "30"], check=True)
    schema = json.load(open(os.path.join(schema_dir, "sample-meta.schema.json")))
    try:
        jsonschema.validate(json.load(open(out + ".json")), schema)
        print("ok   sample-meta sidecar")
    except Exception as e:  # noqa: BLE001
        failed += 1
        print("FAIL sample-meta sidecar", str(e)[:300])

sys.exit(1 if failed else 0)
