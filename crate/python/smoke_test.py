#!/usr/bin/env python3
"""Smoke test for the strichartz_lab extension module.

Build the module first:

    cargo build -p strichartz-py --release
    ln -sf ../target/release/libstrichartz_lab.so python/strichartz_lab.so

then run `python3 python/smoke_test.py`.
"""

import math
import pathlib
import sys

HERE = pathlib.Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

for candidate in (
    HERE.parent / "target" / "release",
    HERE.parent / "target" / "debug",
):
    so = candidate / "libstrichartz_lab.so"
    link = HERE / "strichartz_lab.so"
    if so.exists() and not link.exists():
        link.symlink_to(so)
        break

import strichartz_lab as lab  # noqa: E402

failures = 0


def check(name, ok, detail=""):
    global failures
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}" + (f"  ({detail})" if detail else ""))
    if not ok:
        failures += 1


# 1. Parseval: L2 of the synthesis equals the H^0 norm
field = lab.SpectralField.zeros(4, "2d")
field.set_coeff(1, 0, 0.5 + 0.25j)
field.set_coeff(-2, 3, 1.0 - 1.0j)
grid = lab.make_grid(4, 2.0, 1.0)
samples = lab.synthesize(field, grid)
l2 = lab.lq_norm(samples, 2.0)
h0 = lab.hs_norm(field, 0.0)
check("parseval identity", abs(l2 - h0) <= 1e-10 * h0, f"L2={l2:.12g} H0={h0:.12g}")

# 2. round trip analyze(synthesize(f)) == f
back = lab.analyze(samples, grid)
diff = max(
    abs(a - b) for a, b in zip(back.coeffs(), field.coeffs())
)
check("transform round trip", diff < 1e-12, f"max coeff diff {diff:.2e}")

# 3. the diagonal profile is stationary under the non-elliptic flow
diag = lab.SpectralField.zeros(3, "1d")
diag.set_coeff(1, 0, 1.0 + 0.0j)
diag.set_coeff(-2, 0, 0.3 - 0.1j)
lift = lab.stationary_2d(diag)
moved = lab.evolve(lift, 0.7, "non-elliptic")
drift = max(abs(a - b) for a, b in zip(moved.coeffs(), lift.coeffs()))
check("stationary diagonal profile", drift < 1e-12, f"drift {drift:.2e}")

# 4. unitary case: the best constant at p=q=2, s=0 is exactly 1
est = lab.estimate_ascent(2.0, 2.0, 0.0, 2, 1, 42)
check(
    "unitary best constant",
    abs(est.value - 1.0) < 1e-9 and est.converged,
    f"value {est.value:.12g} in {est.iterations} iterations",
)

# 5. bump-family scaling: L4 norm of eta(lambda x) decays like lambda^(-1/4)
pts = []
for lam in (4.0, 8.0, 16.0, 32.0):
    g = lab.family_grid(lam)
    f = lab.bump_1d(lam, g)
    pts.append((lam, lab.lq_norm(lab.synthesize(f, g), 4.0)))
slope, _, _ = lab.fit_loglog(pts)
check("bump L4 scaling exponent", abs(slope + 0.25) < 0.02, f"slope {slope:.4f}")

# 6. sharpness exponent of the stationary family at s = 0: 1/p
pts = [(lam, lab.strichartz_ratio_family(lam, 4.0, 4.0, 0.0)) for lam in (4.0, 8.0, 16.0)]
slope, _, _ = lab.fit_loglog(pts)
check("stationary ratio exponent", abs(slope - 0.25) < 0.03, f"slope {slope:.4f}")

# 7. dispersive scaling: |t|^(1/2) sup|K1| stays within a bounded band
# over the whole window [h^2/10, h]
h = 0.0625
ts = [h * h / 10.0 * (h / (h * h / 10.0)) ** (i / 8.0) for i in range(9)]
prof = lab.dispersive_profile(h, ts)
scaled = [r[2] for r in prof]
spread = max(scaled) / min(scaled)
check("dispersive kernel ceiling", spread < 3.0, f"spread x{spread:.3f}")

print()
if failures:
    print(f"{failures} smoke check(s) failed")
    sys.exit(1)
print("all smoke checks passed")
