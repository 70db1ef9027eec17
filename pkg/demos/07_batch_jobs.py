"""Batch jobs through the command-line front end.

A job is one JSON document. Every run leaves a manifest that reruns the job
with byte-identical outputs.
"""
import json
import pathlib
import tempfile

from pathrkhs.cli import main

work = pathlib.Path(tempfile.mkdtemp())
job = {"command": "sample", "kernel": {"kind": "fbm", "alpha": 0.75},
       "quadrature": {"scheme": "gl", "n": 256}, "params": {"count": 3, "N": 32}, "seed": 7}
(work / "job.json").write_text(json.dumps(job))

status = main(["--config", str(work / "job.json"), "--out", str(work / "run1")])
print("exit", status, sorted(p.name for p in (work / "run1").rglob("*") if p.is_file()))

# rerun from the manifest
main(["--config", str(work / "run1" / "manifest.json"), "--out", str(work / "run2")])
same = all((work / "run1" / p).read_bytes() == (work / "run2" / p).read_bytes()
           for p in ("norm_stats.json", "paths/sample_0000.csv", "manifest.json"))
print("byte-identical rerun:", same)

# analyze exits 0 on a decision, 2 when the evidence is inconclusive
for alpha in (0.75, 0.55):
    (work / "a.json").write_text(json.dumps({"command": "analyze", "kernel": {"kind": "fbm", "alpha": alpha}}))
    print(f"fbm({alpha}) exit", main(["--config", str(work / "a.json"), "--out", str(work / f"a{alpha}")]))
