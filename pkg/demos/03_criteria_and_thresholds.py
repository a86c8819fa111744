"""
Local-realism conditions and their noise thresholds
===================================================

Three conditions are checked for the noisy GHZ mixture.  Each has a
critical visibility above which it is violated.  The full-sphere
condition depends on the maximal correlation, so its threshold moves
with how that maximum is obtained.
"""

from omnibell import check_all, correlation_tensor, ghz_noise_mixture, threshold

###############################################################################
# Verdicts at a few visibilities.

for f in (0.38, 0.45, 0.55):
    tensor = correlation_tensor(ghz_noise_mixture(f))
    reports = check_all(tensor)
    flags = ", ".join(f"{r.criterion_id}={'V' if r.violated else '-'}" for r in reports)
    print(f"f = {f}: {flags}")

###############################################################################
# Critical visibilities.  ``frame_entries`` takes the maximal correlation to
# be the largest tensor entry, which underestimates it for this state.

for mode in ("optimized", "frame_entries"):
    print(f"\nT_max mode: {mode}")
    for cid in ("two_setting", "plane", "full_sphere"):
        res = threshold(ghz_noise_mixture, cid, tmax_mode=mode)
        print(f"  {cid:<12} f* = {res.critical_f:.6f}  ({res.method})")
