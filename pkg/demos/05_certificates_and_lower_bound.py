# %% [markdown]
# # Dual certificates and a lower bound
#
# The golfing scheme builds a dual vector from disjoint groups of draws.  If
# four inequalities hold, the planted signal is the unique l1 minimizer.

# %%
import numpy as np

from blockcs import blocks, certificates, montecarlo, operators, sampling
from blockcs.solver import basis_pursuit

# %%
n, s, m = 256, 2, 800
rng = np.random.default_rng(0)
x = montecarlo.random_signal(n, s, rng)
A = sampling.isolated_sampler(operators.dft_operator(n), np.full(n, 1 / n), m, seed=0)
schedule = certificates.golfing_schedule(s, n, m)
report = certificates.golfing_certificate(
    sampling.partition_for_golfing(A, schedule.sizes), x.support, np.exp(1j * np.angle(x.values))
)
print("groups:", schedule.sizes)
print("||w|| per step:", np.round(report.w_norms, 4))
print("flags:", report.inv_ok, report.col_ok, report.vS_ok, report.vSc_ok)
print("recovered:", basis_pursuit(A.operator, A.matvec(x.dense()), reference=x.dense()).success)

# %% [markdown]
# At m = 120 the off-support part of v stays well above 1/4, so no
# certificate is found, even though l1 recovery works every time.

# %%
A120 = sampling.isolated_sampler(operators.dft_operator(n), np.full(n, 1 / n), 120, seed=0)
sch = certificates.golfing_schedule(5, n, 120)
y = montecarlo.random_signal(n, 5, rng)
r = certificates.golfing_certificate(sampling.partition_for_golfing(A120, sch.sizes), y.support, np.exp(1j * np.angle(y.values)))
print("vSc_inf =", round(r.vSc_inf, 3))

# %% [markdown]
# Horizontal k-space lines cannot tell apart images that live on one image
# column: A (alpha (x) e0) only depends on the m x sqrt(n) factor formed by
# the sampled rows of the 1-D DFT.  With 9 lines and s = 5 that factor has
# fewer rows than 2s, so two distinct 5-sparse images share their
# measurements.

# %%
lines = blocks.line_blocks(operators.dft_operator(16))
K = sampling.draw_distinct_blocks(lines, blocks.DrawingDistribution.uniform(16), 9, seed=0)
test = certificates.identifiability_rank_test(certificates.reduced_line_matrix(K), 5)
X1 = certificates.lift_column_signal(test.x1, 16)
X2 = certificates.lift_column_signal(test.x2, 16)
print("identifiable:", test.identifiable)
print("||X1 - X2|| =", np.linalg.norm(X1 - X2), " ||A X1 - A X2|| =", np.linalg.norm(K.matvec(X1) - K.matvec(X2)))

# %% [markdown]
# Non-identifiability means no decoder gets every such signal right; it does
# not make every single instance fail.  Basis pursuit still recovers about
# half of the random column signals at m = 9.

# %%
diagram = montecarlo.phase_transition(
    lines, blocks.DrawingDistribution.uniform(16), [5], [9, 16], trials=20, seed=0,
    signal_class="pathological", distinct=True,
)
for c in diagram.cells:
    print(f"m={c.m}: success {c.frequency:.2f}, identifiable in {c.identifiable_trials}/{c.trials}")
