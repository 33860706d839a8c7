# %% [markdown]
# # SU(2) cat from a single Fock excitation
#
# Start with the ion in |down> and all n quanta in mode B. A conditional
# exchange pulse splits the motion into U(+theta) and U(-theta) branches, and
# reading the qubit in the z basis leaves a superposition of two spin
# coherent states on the m+n=n sector.

# %%
import math

import numpy as np

from ionmodes import Dims, Su2Params, fidelity, joint_number_distribution, make_cat_reference
from ionmodes.protocols import run_p1_su2_cat

dims = Dims(8)
report = run_p1_su2_cat(n=2, theta=math.pi / 3, dims=dims)
for b in report.branches:
    print(b.outcome, round(b.probability, 6), b.fidelities)

# %% [markdown]
# The down branch matches the cat built with zeta = -i tan(theta). The half
# angle version misses by a visible margin.

# %%
down = report.branch("down")
for label, zeta in [("tan(theta)", -1j * math.tan(math.pi / 3)), ("tan(theta/2)", -1j * math.tan(math.pi / 6))]:
    cat = make_cat_reference("su2_cat", Su2Params(zeta, 2), "+", dims)
    print(f"{label:>13}: F = {fidelity(down.state, cat):.6f}")

# %%
# all the weight stays on the two-quantum diagonal
p = joint_number_distribution(down.state).p
print(np.round(p[:3, :3], 4))

# %% [markdown]
# P(down) = (1 + <0,n|U(2 theta)|0,n>)/2. For n=2 that overlap is cos^2(2 theta).

# %%
for theta in np.linspace(0, math.pi / 2, 5):
    r = run_p1_su2_cat(2, theta, dims)
    print(f"theta={theta:.3f}  P(down)={r.probability('down'):.6f}  formula={(1 + math.cos(2 * theta) ** 2) / 2:.6f}")
