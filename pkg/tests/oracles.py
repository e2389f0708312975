"""Independent reference values: printed closed forms and textbook identities."""

import math

def theta_star_closed_form(family: str, p: float) -> float:
    """Printed symmetric thresholds of the three families."""
    if family == "contamination":
        if p == 0.0:
            return 0.5
        return (4 * p - 1 - math.sqrt(8 * p + 1)) / (4 * (p - 1))
    if family == "triangle":
        return (-p * p - p + 3 + math.sqrt(p**4 + 2 * p**3 + 3 * p * p - 6 * p + 1)) / 4
    if family == "epsilon":
        if p < 1.0 / 3.0:
            return (-2 * p + 1 + math.sqrt(4 * p * p + 12 * p + 1)) / 4
        return (p + 1) / 2
    raise ValueError(family)


def vartheta_star_closed_form(family: str, p: float) -> float:
    """Printed ambiguous symmetric thresholds of the three families."""
    if family == "contamination":
        return (4 * p * p - 7 * p + 1 + math.sqrt(-7 * p * p + 10 * p + 1)) / (4 * (p * p - 2 * p + 1))
    if family == "triangle":
        if p <= math.sqrt(2.0):
            return (-p**3 - 2 * p + 4 + p * math.sqrt(p**4 + 4 * p * p - 4)) / 4
        return (-3 * p + 4 + math.sqrt(9 * p * p - 8 * p)) / 4
    if family == "epsilon":
        return (-4 * p + 1 + math.sqrt(16 * p + 1)) / 4
    raise ValueError(family)


def perceived_alt(chi1: float, chi2: float) -> float:
    """Player 1's perceived utility written through trade probabilities ``p1, p2``."""
    hi = max(chi1, chi2)
    lo = min(chi1, chi2)
    more = (2 * hi - 1) / (2 * hi)
    less = (2 * hi - 1) / (2 * (2 * hi - lo))
    if chi1 <= chi2:
        p1, p2 = less, more
        return 0.5 - (1 - chi1) * p1 * p1 + p1 * p2 - chi1 * p1 * p1 * p2
    p1, p2 = more, less
    return 0.5 + (1 - chi1) * p2 * p2 + (2 * chi1 - 1) * p1 * p2 - chi1 * p1 * p1 * p2
