"""Small helpers for keeping arithmetic in ``Fraction`` when inputs allow it."""
from fractions import Fraction
from numbers import Rational


def is_exact(*values) -> bool:
    return all(isinstance(v, Rational) for v in values)


def as_exact(x):
    """Fraction for ints/Fractions, float otherwise."""
    if isinstance(x, Rational):
        return Fraction(x)
    return float(x)


def _int_root(n: int, k: int):
    """Integer k-th root of n >= 0 if n is a perfect k-th power, else None."""
    if n < 2:
        return n
    r = int(round(n ** (1.0 / k))) if n.bit_length() < 1000 else 1 << (n.bit_length() // k)
    # Newton polish for big integers
    while True:
        nxt = ((k - 1) * r + n // r ** (k - 1)) // k
        if nxt >= r:
            break
        r = nxt
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** k == n:
            return cand
    return None


def rational_pow(base, num: int, den: int = 1):
    """``base ** (num/den)``, exact when ``base`` is a Fraction with an exact den-th root."""
    if den < 0:
        num, den = -num, -den
    if isinstance(base, Rational) and base > 0:
        q = Fraction(base)
        if den == 1:
            return q ** num
        a, b = _int_root(q.numerator, den), _int_root(q.denominator, den)
        if a is not None and b is not None:
            return Fraction(a, b) ** num
    return float(base) ** (num / den)


def exponent_parts(e):
    """Split an exponent into ``(num, den)`` integers when it is rational-valued."""
    if isinstance(e, Rational):
        e = Fraction(e)
        return e.numerator, e.denominator
    if float(e).is_integer():
        return int(e), 1
    return None


def power(base, e):
    """``base ** e`` keeping exactness for rational base and exponent."""
    parts = exponent_parts(e)
    if parts is not None and isinstance(base, Rational):
        return rational_pow(base, *parts)
    return float(base) ** float(e)


def encode_number(x):
    """JSON form: Fractions become ``{"num", "den"}``, everything else a float."""
    if isinstance(x, Rational) and not isinstance(x, int):
        x = Fraction(x)
        return {"num": x.numerator, "den": x.denominator}
    if isinstance(x, int):
        return x
    return float(x)


def decode_number(x):
    if isinstance(x, dict):
        return Fraction(x["num"], x["den"])
    return x
