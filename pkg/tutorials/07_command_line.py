"""Driving experiments from JSON configs, as the command line does.

Equivalent shell commands::

    relshock audit-eos --config tutorials/configs/audit_gamma2.json
    relshock run --config tutorials/configs/batch.json --out out/batch --jobs 2
"""
# %%
import json
import os
import tempfile

from relshock.cli import main

here = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")
out = tempfile.mkdtemp(prefix="relshock-")

# %% Audit prints a JSON report on stdout
code = main(["--verbosity", "quiet", "audit-eos", "--config", os.path.join(here, "audit_gamma2.json")])
print("audit-eos exit code", code)

# %% A batch of scenarios, each in its own directory with a SHA-256 manifest
code = main(["--verbosity", "quiet", "run", "--config", os.path.join(here, "batch.json"), "--out", out, "--jobs", "2"])
print("run exit code", code)
for name in sorted(os.listdir(out)):
    print(name, sorted(os.listdir(os.path.join(out, name))) if os.path.isdir(os.path.join(out, name)) else "")
with open(os.path.join(out, "summary.json")) as fh:
    print(json.load(fh))
