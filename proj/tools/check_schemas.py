#!/usr/bin/env python3
"""Run the CLI over the corpus and validate every JSON artifact against schemas/."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

cli, root = pathlib.Path(sys.argv[1]), pathlib.Path(sys.argv[2])
schemas = {k: json.loads((root / "schemas" / f"{k}.schema.json").read_text()) for k in ("hcpn", "trace", "report")}
analyses = [[], ["--time-mode", "discrete"], ["--bound", "5"], ["--strict-home"]]

failures = 0


def check(kind, text, label):
    global failures
    try:
        jsonschema.validate(json.loads(text), schemas[kind], cls=jsonschema.Draft202012Validator)
    except jsonschema.ValidationError as e:
        failures += 1
        print(f"{label}: {e.message} at {list(e.path)}")


with tempfile.TemporaryDirectory() as tmp:
    for model in sorted((root / "corpus").glob("*.iom")):
        net = pathlib.Path(tmp) / f"{model.stem}.hcpn.json"
        subprocess.run([cli, "transform", model, "--trace", "-o", net], check=True)
        check("hcpn", net.read_text(), net.name)
        check("trace", net.with_name(f"{model.stem}.trace.json").read_text(), f"{model.stem}.trace.json")
        for extra in analyses:
            for source in (model, net):
                out = subprocess.run([cli, "analyze", source, "--format", "json", *extra], capture_output=True, text=True)
                check("report", out.stdout, f"analyze {source.name} {' '.join(extra)}")

print("schemas: ok" if failures == 0 else f"schemas: {failures} failures")
sys.exit(1 if failures else 0)
