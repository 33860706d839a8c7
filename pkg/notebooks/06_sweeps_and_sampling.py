# %% [markdown]
# # Sweeps, sampling and report files
#
# The command-line front end writes JSON reports and CSV tables. Calling
# `main` directly is the same as running `ionmodes ...` in a shell.

# %%
import csv
import json
import tempfile
from pathlib import Path

from ionmodes.cli import main

out = Path(tempfile.mkdtemp())

# %%
main(["sweep", "--protocol", "P1", "--n", "2", "--points", "5", "--output", str(out / "p1.csv")])
for row in csv.DictReader((out / "p1.csv").open()):
    print(row["param"][:6], row["p_down"][:8], row["fidelity_down"][:8])

# %%
# entropy of the P3 half branches as alpha grows, beta held at 1
main(["sweep", "--protocol", "P3", "--variant", "half", "--axis", "alpha", "--points", "4", "--output", str(out / "p3.csv")])
print((out / "p3.csv").read_text())

# %% [markdown]
# Sample mode draws qubit outcomes with a seeded generator, so the file is
# the same on every run.

# %%
args = ["run", "--protocol", "P2", "--n", "3", "--mode", "sample", "--shots", "2000", "--seed", "1"]
main([*args, "--output", str(out / "a.json")])
main([*args, "--output", str(out / "b.json")])
print(json.loads((out / "a.json").read_text())["samples"]["counts"])
print("identical:", (out / "a.json").read_bytes() == (out / "b.json").read_bytes())
