"""Best lift-to-drag angle of attack for the shipped polar and the analytic model."""
import math

import numpy as np

from tailsitter.aero import AnalyticPolar, default_polar, optimal_aoa


def main():
    table = default_polar()
    a = optimal_aoa(table, (0.0, math.radians(30.0)))
    cl, cd = table.coefficients(a)
    print(f"default polar : {math.degrees(a):.4f} deg  L/D = {cl / cd:.3f}")

    p = AnalyticPolar()
    a = optimal_aoa(p, (0.0, math.radians(30.0)))
    exact = math.degrees(math.atan(math.sqrt(p.cd0 / (p.cd0 + p.cd90))))
    print(f"analytic polar: {math.degrees(a):.4f} deg  (closed form {exact:.6f} deg)")

    print("\n alpha   L/D (default polar)")
    for deg in np.arange(0.0, 16.0, 1.0):
        cl, cd = table.coefficients_deg(float(deg))
        print(f"{deg:6.1f}  {cl / cd if cd else float('nan'):8.3f}")


if __name__ == "__main__":
    main()
