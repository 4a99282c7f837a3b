"""Anti-Kibble-Zurek behaviour: the best sweep rate grows with the noise.

Minimizing n(kappa) = 1/(pi sqrt(2 kappa)) + 4 lambda kappa gives
v_opt/J^2 = (2^7 pi^2 lambda^2)^{1/3}, i.e. v_opt ~ W^{4/3}.  The all-orders
density shifts the optimum slightly; zeta measures how far the second-order
correction moves it.
"""

import math

from antikz import optimize


def main():
    lams = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2]
    print(f"{'lambda':>8} {'v_1st':>10} {'v_2nd':>10} {'v_inf':>10} {'zeta':>8} {'xi':>8}")
    rows = []
    for lam in lams:
        v1 = optimize.v_opt_closed("first", lam)
        v2 = optimize.v_opt_closed("second", lam)
        vi = optimize.v_opt_numeric(lam).v_opt_over_J2
        rows.append((lam, v1, vi))
        print(f"{lam:8.0e} {v1:10.5f} {v2:10.5f} {vi:10.5f} {optimize.zeta(lam):8.4f} {optimize.xi(lam):8.4f}")

    for (la, a1, ai), (lb, b1, bi) in zip(rows, rows[1:]):
        d = math.log(lb / la)
        print(f"slope {la:.0e}..{lb:.0e}: first order {math.log(b1 / a1) / d:.4f}, all orders {math.log(bi / ai) / d:.4f}")


if __name__ == "__main__":
    main()
