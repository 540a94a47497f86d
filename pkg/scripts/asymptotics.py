"""Local low-theta outage slopes and the high-theta ratio to the 2-D PPP asymptote.

Quadrature only.  Prints a table per order; the local slope is the log-log
derivative of 1 - p over one half-decade.
"""

import argparse

import numpy as np

from coxnet import analytic as an
from coxnet.laws import DeterministicLaw


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mu", type=float, default=0.1)
    ap.add_argument("--lam", type=float, default=0.6)
    ap.add_argument("--p", type=float, default=0.5)
    ap.add_argument("--h", type=float, default=10.0)
    ap.add_argument("--D", type=float, default=0.25)
    ap.add_argument("--alpha", type=float, default=4.0)
    a = ap.parse_args()
    law = DeterministicLaw(a.h)
    lam_p = a.lam * a.p
    for m in (2, 4):
        print(f"order {m}: claimed low-theta exponent {an.low_theta_exponent(m, a.alpha):.3f}")
        for t in np.logspace(-12, -2, 11):
            pair = [1 - an.psp_success(m, a.mu, lam_p, a.D, a.alpha, x, law) for x in (t, t * 10 ** 0.5)]
            print(f"  theta {t:8.1e}  outage {pair[0]:.3e}  local slope {an.loglog_slope([t, t * 10 ** 0.5], pair):.4f}")
        for t in (1e1, 1e2, 1e3, 1e4):
            p = an.psp_success(m, a.mu, lam_p, a.D, a.alpha, t, law)
            ref = an.high_theta_asymptote(t, a.mu, a.lam, a.p, a.D, a.alpha, law)
            print(f"  theta {t:8.1e}  p {p:.4e}  PPP2 {ref:.4e}  ratio {p / ref:.3f}")


if __name__ == "__main__":
    main()
