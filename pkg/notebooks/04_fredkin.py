# %% [markdown]
# # Controlled SWAP on single excitations
#
# A quarter conditional pulse followed by a quarter plain pulse adds up to
# U(pi/2) when the qubit is in |+> and cancels to the identity in |->.
# U(pi/2) swaps the mode occupations with a phase that depends on them.

# %%
from ionmodes import Dims
from ionmodes.protocols import run_p4_fredkin

report = run_p4_fredkin(Dims(4))
print(f"{'input':<14} {'output':<14} {'phase':>16} {'other sign':>16}")
for row in report.truth_table:
    phase = complex(*row["phase"])
    other = complex(*row["expected_phase_opposite_sign"])
    print(f"{row['input']:<14} {row['output']:<14} {phase:>16.3f} {other:>16.3f}")

# %%
for key in ("unitarity_deviation", "phase_stripped_cswap_deviation", "cross_method_deviation"):
    print(key, report.checks[key])
