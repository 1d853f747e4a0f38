#!/usr/bin/env python3
"""Runs the CLI on a config and validates report.json against the schema."""

import argparse
import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--config", required=True)
    ap.add_argument("--schema", required=True)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    shutil.rmtree(out, ignore_errors=True)
    proc = subprocess.run([args.cli, "run", "--config", args.config, "--out", str(out)])
    if proc.returncode != 0:
        print(f"ideaforge run exited with {proc.returncode}", file=sys.stderr)
        return 1

    report_dir = out / "report"
    report = json.loads((report_dir / "report.json").read_text())
    schema = json.loads(pathlib.Path(args.schema).read_text())
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
    for e in errors:
        print(f"schema violation at /{'/'.join(map(str, e.path))}: {e.message}", file=sys.stderr)

    missing = [f for f in report["files"]["csv"] + report["files"]["charts"] if not (report_dir / f).is_file()]
    for f in missing:
        print(f"listed file missing: {f}", file=sys.stderr)

    manifest = json.loads((out / "manifest.json").read_text())
    recorded = {p for st in manifest["stages"].values() for p in st["outputs"]}
    unrecorded = [
        str(p.relative_to(out))
        for p in out.rglob("*")
        if p.is_file() and p.name != "manifest.json" and ".scratch" not in p.relative_to(out).parts
        and str(p.relative_to(out)) not in recorded
    ]
    for f in unrecorded:
        print(f"file not in manifest: {f}", file=sys.stderr)

    if errors or missing or unrecorded:
        return 1
    print(f"report.json valid; {len(report['files']['csv'])} csv and {len(report['files']['charts'])} charts present")
    return 0


if __name__ == "__main__":
    sys.exit(main())
