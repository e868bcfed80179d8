"""Double-double arithmetic (about 32 significant digits).

A value is an unevaluated sum ``hi + lo`` of two doubles.  Every helper is
written with plain arithmetic so it works elementwise on numpy arrays and
compiles unchanged under numba.  Complex double-double numbers are carried
as four doubles ``(re_hi, re_lo, im_hi, im_lo)``.
"""
from __future__ import annotations

from .._accel import jitable

_SPLITTER = 134217729.0  # 2**27 + 1


@jitable
def two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


@jitable
def quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


@jitable
def split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


@jitable
def two_prod(a, b):
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


@jitable
def dd_add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e = e + t
    s, e = quick_two_sum(s, e)
    e = e + f
    return quick_two_sum(s, e)


@jitable
def dd_mul(ah, al, bh, bl):
    p, e = two_prod(ah, bh)
    e = e + (ah * bl + al * bh)
    return quick_two_sum(p, e)


@jitable
def dd_mul_d(ah, al, b):
    p, e = two_prod(ah, b)
    e = e + al * b
    return quick_two_sum(p, e)


@jitable
def dd_div(ah, al, bh, bl):
    q1 = ah / bh
    ph, pl = dd_mul_d(bh, bl, q1)
    rh, rl = dd_add(ah, al, -ph, -pl)
    q2 = rh / bh
    ph, pl = dd_mul_d(bh, bl, q2)
    rh, rl = dd_add(rh, rl, -ph, -pl)
    q3 = rh / bh
    q1, q2 = quick_two_sum(q1, q2)
    return dd_add(q1, q2, q3, 0.0 * q3)


@jitable
def cdd_mul(arh, arl, aih, ail, brh, brl, bih, bil):
    """(a_r + i a_i)(b_r + i b_i) in double-double."""
    xh, xl = dd_mul(arh, arl, brh, brl)
    yh, yl = dd_mul(aih, ail, bih, bil)
    rh, rl = dd_add(xh, xl, -yh, -yl)
    xh, xl = dd_mul(arh, arl, bih, bil)
    yh, yl = dd_mul(aih, ail, brh, brl)
    ih, il = dd_add(xh, xl, yh, yl)
    return rh, rl, ih, il


@jitable
def cdd_div(arh, arl, aih, ail, brh, brl, bih, bil):
    """(a)/(b) for complex double-double operands."""
    nh, nl = dd_mul(brh, brl, brh, brl)
    mh, ml = dd_mul(bih, bil, bih, bil)
    nh, nl = dd_add(nh, nl, mh, ml)
    rh, rl, ih, il = cdd_mul(arh, arl, aih, ail, brh, brl, -bih, -bil)
    rh, rl = dd_div(rh, rl, nh, nl)
    ih, il = dd_div(ih, il, nh, nl)
    return rh, rl, ih, il
