"""Baseline convergence orders on band-limited NLS data.

A reduced-size version of configs/smooth_nls_1d.ini: first order for the
filtered one-stage scheme, second order for its two-stage variant and for
Strang splitting.  Writes the (tau, error) table to stdout and, when
matplotlib is importable, a log-log plot to demo_smooth_orders.png.

Run:  python demos/02_smooth_orders.py          (~30 s)
"""

import duhamel as dh

grid = dh.make_grid("torus", 1, 256)
eq = dh.make_equation("nls", grid, sign=1, power=1)
u0 = dh.smooth_field(grid, seed=0, target_norm=1.0, cutoff=4)

taus = [2.0 ** -k for k in range(6, 11)]
t_end = 1.0
tau_ref = min(taus) / 100

print("computing the cross-checked reference ...")
ref = dh.reference_solution(eq, u0, t_end, tau_ref)

schemes = ["duhamel1", "duhamel2", "strang"]
table = {}
for scheme in schemes:
    errs = []
    for tau in taus:
        final = dh.evolve(eq, scheme, u0, tau, t_end).final
        errs.append(dh.sobolev_norm(final - ref, 0.0))
    fit = dh.fit_order(list(zip(taus, errs)))
    table[scheme] = (errs, fit.slope)

print(f"\n{'tau':>12} " + " ".join(f"{s:>12}" for s in schemes))
for i, tau in enumerate(taus):
    row = " ".join(f"{table[s][0][i]:12.3e}" for s in schemes)
    print(f"{tau:12.5f} {row}")
print(f"{'slope':>12} " + " ".join(f"{table[s][1]:12.3f}" for s in schemes))

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(5, 4))
    for scheme in schemes:
        ax.loglog(taus, table[scheme][0], "o-", label=f"{scheme} ({table[scheme][1]:.2f})")
    ax.set_xlabel("tau")
    ax.set_ylabel("L2 error at T=1")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig("demo_smooth_orders.png", dpi=150)
    print("\nwrote demo_smooth_orders.png")
except ImportError:
    pass
