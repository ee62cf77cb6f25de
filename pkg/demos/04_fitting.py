"""Fit model families to an empirical CDF and compare their errors.

The statistic is max |log10 Fe - log10 Fa| over the empirical abscissae,
which overweights the deep-fade region.  Nested families (single frozen
ray, frozen ray pair, single fluctuating ray) can never beat the full
model by construction; the comparison mirrors the usual fitting tables.
"""

import math

from iftr import IftrParams
from iftr.fitting import FitConfig, empirical_cdf_from_samples, fit
from iftr.sim import SimConfig, sample_iftr

print("== synthetic measurement: K=15, Delta=0.9, m1=2, m2=10, n=1e5 ==")
p_true = IftrParams(k=15.0, delta=0.9, m1=2.0, m2=10.0, mean_snr=1.0)
snr = sample_iftr(p_true, SimConfig(n_samples=10 ** 5, seed=2024, output="snr"))
emp = empirical_cdf_from_samples(snr)
print(f"  {len(emp.x)} quantile-grid points spanning F = {emp.F[0]:.5f} .. {emp.F[-1]:.5f}")


def show(name, res):
    q = res.params
    m1 = "inf" if q.m1 == math.inf else f"{q.m1:.3g}"
    m2 = "inf" if q.m2 == math.inf else f"{q.m2:.3g}"
    print(
        f"  {name:16s} eps={res.epsilon:.4f}  K={q.k:9.3f}  Delta={q.delta:.3f}  "
        f"(m1, m2)=({m1}, {m2})"
    )


print()
print("== family comparison (smaller eps is better) ==")
for family in ("iftr", "twdp", "rice", "rician-shadowed"):
    res = fit(emp, FitConfig(model_family=family, restarts=3, seed=1))
    show(family, res)

print()
print("== integer-constrained m1 (closed-form-friendly fit) ==")
res = fit(
    emp,
    FitConfig(model_family="iftr-integer-m1", m1_grid=tuple(range(1, 7)), restarts=2, seed=1),
)
show("iftr-integer-m1", res)
print()
print("note: the epsilon floor is set by quantile sampling noise at the")
print("deepest grid level, so even the true parameters score around there.")
