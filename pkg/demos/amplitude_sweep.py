"""How the Bell value and the single-cavity sigma_y grow with cat size.

Both are capped by the displaced Y measurement, which pays a factor
e^{-pi^2/(8 beta^2)} per cavity: small cats cannot tell Y from -Y, large
cats approach the two-level limits 16 and 1. Printed next to the numerics
are the closed forms they should track.
"""

import math
import warnings

import numpy as np

from hybridghz.errors import EncodingValidityWarning
from hybridghz.mermin import ideal_bell_vs_amplitude, sigma_y_single_cavity


def closed_form_bell(beta):
    y = math.exp(-math.pi**2 / (8.0 * beta**2))
    return 4.0 * (1.0 + y) ** 2


def closed_form_sigma(beta):
    y = math.exp(-math.pi**2 / (8.0 * beta**2))
    return y * (1.0 + math.exp(-(beta**2) / 2.0))


def main():
    betas = np.linspace(1.0, 4.0, 13)
    with warnings.catch_warnings():
        # betas below ~1.73 are deliberately in the degenerate-encoding zone
        warnings.simplefilter("ignore", EncodingValidityWarning)
        curve = ideal_bell_vs_amplitude(betas)

    print(" beta    <B>      closed   sigma_y  closed")
    for beta, bell in curve:
        sigma = sigma_y_single_cavity(beta)
        print(
            f"{beta:5.2f} {bell:8.4f} {closed_form_bell(beta):8.4f}"
            f" {sigma:9.4f} {closed_form_sigma(beta):7.4f}"
        )

    print()
    print("Limits: <B> -> 16 and sigma_y -> 1 as beta -> inf, but the approach")
    print("is slow. At beta = 4 the exact values are still 14.835 and 0.926;")
    print("crossing 15.5 / 0.95 takes beta of about 6.2 / 4.9.")


if __name__ == "__main__":
    main()
