# %% [markdown]
# # Entangled number states
#
# A quarter conditional pulse followed by a quarter unconditional pulse takes
# |down>|0,n> to a two-mode state with all n quanta either in A or in B. Each
# qubit outcome shows up half the time.

# %%
import math

from ionmodes import Dims, entanglement_entropy
from ionmodes.protocols import exchange_phase, run_p2_entangled_number

dims = Dims(8)
print("single exchange amplitude:", exchange_phase())

# %%
for n in range(1, 6):
    report = run_p2_entangled_number(n, dims)
    down = report.branch("down")
    ratio = down.phases["ratio_n0_over_0n"]
    print(
        f"n={n}  P(down)={down.probability:.3f}  S={entanglement_entropy(down.state):.6f} bit"
        f"  <n,0>/<0,n>={ratio:+.3f}  opposite sign convention gives {down.phases['expected_ratio_opposite_sign']:+.3f}"
    )

# %% [markdown]
# Odd n is where the two sign conventions for the exchange generator part
# ways: exp(-i theta K) gives (-i)^n, exp(+i theta K) gives i^n. Even n agrees.

# %%
report = run_p2_entangled_number(3, dims)
print(report.checks["conventions_agree"], report.convention_note)

# %%
# the up branch carries the minus sign on |0,n>
up = run_p2_entangled_number(2, dims).branch("up")
print(up.state.amplitude(2, 0), up.state.amplitude(0, 2), math.sqrt(0.5))
