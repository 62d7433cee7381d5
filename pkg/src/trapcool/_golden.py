import math

INV_PHI = (math.sqrt(5) - 1) / 2


def golden_section(f, a, b, tol=1e-8):
    """Minimize ``f`` on ``[a, b]`` assuming a single local minimum there.

    Returns ``(x, f(x))`` for the best point seen, including both ends.
    """
    a, b = min(a, b), max(a, b)
    fa, fb = f(a), f(b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = min((fa, a), (fb, b), (fc, c), (fd, d))
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            best = min(best, (fc, c))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            best = min(best, (fd, d))
    return best[1], best[0]
