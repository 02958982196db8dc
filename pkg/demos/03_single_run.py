"""One short seeded protocol run, from states to a shared secret key."""

import sys
import tempfile

import numpy as np

from cvqkd import ProtocolConfig, run_protocol
from cvqkd.report import emit_report

# short link and small blocks so the run takes seconds
cfg = ProtocolConfig(L=0.5, N=60_000, n_bks=2, pe_fraction=0.3,
                     eps_pe=1e-3, eps_s=1e-3, eps_h=1e-3, seed=7)
rep = run_protocol(cfg)

print("status:", rep.status)
print("estimates:", {k: round(v, 5) for k, v in rep.estimates.items()})
print(f"code rate {rep.code['R_code']:.3f}, p_EC {rep.p_EC:.2f}, mean decoding round {rep.mean_fnd_rnd:.1f}")
print(f"composable rate R = {rep.R:.4f} bits/use, key length r = {rep.r}, epsilon = {rep.epsilon:.3g}")
if rep.key_emitted:
    print("Alice and Bob agree:", np.array_equal(rep.K_alice, rep.K_bob), "| first bytes:",
          np.packbits(rep.K_bob[:64]).tobytes().hex())

out = sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="cvqkd_")
print("written:", *[str(p) for p in emit_report(rep, out)])
