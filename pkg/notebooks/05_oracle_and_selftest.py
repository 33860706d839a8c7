# %% [markdown]
# # Two routes to the beam splitter
#
# The closed form builds each total-excitation block from binomial sums. The
# oracle exponentiates the truncated generator with scipy. They should agree
# to rounding.

# %%
import math
import time

import numpy as np

from ionmodes import selftest
from ionmodes.evolution import beam_splitter_expm_oracle, beam_splitter_matrix

for n_max in (4, 12, 30):
    t0 = time.perf_counter()
    dev = max(
        np.abs(beam_splitter_matrix(t, n_max).to_dense() - beam_splitter_expm_oracle(t, n_max).to_dense()).max()
        for t in (0.1, math.pi / 4, math.pi / 2, 1.9)
    )
    print(f"n_max={n_max:>2}  max deviation {dev:.2e}  ({time.perf_counter() - t0:.2f} s)")

# %% [markdown]
# The same comparison plus the property checks run as one self-test.

# %%
for r in selftest.run_checks((4, 12)):
    print(f"{r.suite:<20}{r.n_max:>4}  {r.deviation:.2e} <= {r.tolerance:.0e}  {'ok' if r.passed else 'FAIL'}")
