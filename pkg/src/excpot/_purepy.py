"""Pure-Python implementations of the hot kernels.

Same signatures and results as the compiled ``_ckernels`` module.  Complex
double-double numbers are float64 quadruples ``(re_hi, re_lo, im_hi, im_lo)``.
"""

from __future__ import annotations

import math
from math import gcd

import numpy as np

__all__ = ["gauss_jordan", "rk4_integrate", "poly_eval", "NAME"]

NAME = "python"


# -- exact sparse elimination over Z[i] ---------------------------------------
def _combine(pc, R, rc, P):
    """``pc*R - rc*P`` for sparse Gaussian-integer rows, divided by its content."""
    a, b = pc
    c, d = rc
    out = {}
    for col, (x, y) in R.items():
        out[col] = (a * x - b * y, a * y + b * x)
    for col, (x, y) in P.items():
        u = c * x - d * y
        v = c * y + d * x
        cur = out.get(col)
        if cur is None:
            out[col] = (-u, -v)
        else:
            nu = cur[0] - u
            nv = cur[1] - v
            if nu or nv:
                out[col] = (nu, nv)
            else:
                del out[col]
    g = 0
    for x, y in out.values():
        g = gcd(g, x, y)
        if g == 1:
            return out
    if g > 1:
        out = {col: (x // g, y // g) for col, (x, y) in out.items()}
    return out


def gauss_jordan(rows, columns):
    """Gauss-Jordan elimination on sparse rows over the Gaussian integers.

    ``rows`` is a list of ``{col: (re, im)}`` dicts (modified copies are
    returned), ``columns`` the sorted column ids to process.  The pivot for a
    column is the lowest-index non-pivot row holding it.  Returns
    ``(pivots, rows)`` with ``pivots`` mapping column -> row index.
    """
    rows = [dict(r) for r in rows]
    where: dict[int, set] = {}
    for idx, r in enumerate(rows):
        for col in r:
            where.setdefault(col, set()).add(idx)
    pivots: dict[int, int] = {}
    used: set[int] = set()
    for col in columns:
        holders = where.get(col)
        if not holders:
            continue
        cand = [r for r in holders if r not in used]
        if not cand:
            continue
        p = min(cand)
        used.add(p)
        pivots[col] = p
        P = rows[p]
        pc = P[col]
        for r in sorted(holders):
            if r == p:
                continue
            R = rows[r]
            new = _combine(pc, R, R[col], P)
            for c2 in R:
                if c2 not in new:
                    where[c2].discard(r)
            for c2 in new:
                if c2 not in R:
                    where.setdefault(c2, set()).add(r)
            rows[r] = new
    return pivots, rows


# -- double-double helpers ------------------------------------------------------
_SPLIT = 134217729.0  # 2^27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _two_prod(a, b):
    p = a * b
    if not math.isfinite(p):
        return p, 0.0
    t = _SPLIT * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLIT * b
    bh = t - (t - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    t, f = _two_sum(al, bl)
    e += t
    s, e = _quick_two_sum(s, e)
    e += f
    return _quick_two_sum(s, e)


def _dd_mul(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    e += ah * bl + al * bh
    return _quick_two_sum(p, e)


def _cdd_add(a, b):
    rh, rl = _dd_add(a[0], a[1], b[0], b[1])
    ih, il = _dd_add(a[2], a[3], b[2], b[3])
    return (rh, rl, ih, il)


def _cdd_mul(a, b):
    rr = _dd_mul(a[0], a[1], b[0], b[1])
    ii = _dd_mul(a[2], a[3], b[2], b[3])
    ri = _dd_mul(a[0], a[1], b[2], b[3])
    ir = _dd_mul(a[2], a[3], b[0], b[1])
    re = _dd_add(rr[0], rr[1], -ii[0], -ii[1])
    im = _dd_add(ri[0], ri[1], ir[0], ir[1])
    return (re[0], re[1], im[0], im[1])


def _cdd_scale(a, s):
    """Multiply by an exact double ``s``."""
    re = _dd_mul(a[0], a[1], s, 0.0)
    im = _dd_mul(a[2], a[3], s, 0.0)
    return (re[0], re[1], im[0], im[1])


_CZERO = (0.0, 0.0, 0.0, 0.0)
_CONE = (1.0, 0.0, 0.0, 0.0)


class _Field:
    def __init__(self, exps, coefs, offsets):
        self.exps = [tuple(int(v) for v in e) for e in np.asarray(exps)]
        self.coefs = [tuple(float(v) for v in c) for c in np.asarray(coefs)]
        self.offsets = [int(v) for v in offsets]
        self.maxdeg = [max((e[j] for e in self.exps), default=0) for j in range(4)]
        self.ccoefs = [complex(c[0] + c[1], c[2] + c[3]) for c in self.coefs]

    def eval_dd(self, z):
        pw = []
        for j in range(4):
            row = [_CONE]
            for _ in range(self.maxdeg[j]):
                row.append(_cdd_mul(row[-1], z[j]))
            pw.append(row)
        out = []
        for f in range(len(self.offsets) - 1):
            acc = _CZERO
            for t in range(self.offsets[f], self.offsets[f + 1]):
                e = self.exps[t]
                term = self.coefs[t]
                for j in range(4):
                    if e[j]:
                        term = _cdd_mul(term, pw[j][e[j]])
                acc = _cdd_add(acc, term)
            out.append(acc)
        return out

    def eval_d(self, z):
        pw = []
        for j in range(4):
            row = [1 + 0j]
            for _ in range(self.maxdeg[j]):
                row.append(row[-1] * z[j])
            pw.append(row)
        out = []
        for f in range(len(self.offsets) - 1):
            acc = 0j
            for t in range(self.offsets[f], self.offsets[f + 1]):
                e = self.exps[t]
                acc += self.ccoefs[t] * pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]] * pw[3][e[3]]
            out.append(acc)
        return out


def _finite(z):
    return all(math.isfinite(v) for c in z for v in c)


def rk4_integrate(exps, coefs, offsets, z0, dt, nsteps, stride, dd):
    """Classical RK4 for a polynomial vector field on C^4.

    ``z0`` has shape (4, 4) in the quadruple layout.  Returns
    ``(samples, steps_done)`` with ``samples`` of shape (m, 4, 4) holding the
    initial state and every ``stride``-th step.  Integration stops at the
    first non-finite state.
    """
    field = _Field(exps, coefs, offsets)
    nsteps = int(nsteps)
    stride = max(1, int(stride))
    samples = [np.array(z0, dtype=float)]
    if dd:
        z = [tuple(float(v) for v in row) for row in np.asarray(z0)]
        h = float(dt)
        half = h / 2.0
        done = 0
        for step in range(nsteps):
            k1 = field.eval_dd(z)
            k2 = field.eval_dd([_cdd_add(z[j], _cdd_scale(k1[j], half)) for j in range(4)])
            k3 = field.eval_dd([_cdd_add(z[j], _cdd_scale(k2[j], half)) for j in range(4)])
            k4 = field.eval_dd([_cdd_add(z[j], _cdd_scale(k3[j], h)) for j in range(4)])
            nz = []
            for j in range(4):
                s = _cdd_add(k1[j], k4[j])
                s = _cdd_add(s, _cdd_scale(_cdd_add(k2[j], k3[j]), 2.0))
                s = _cdd_scale(s, h)
                s = _cdd_div6(s)
                nz.append(_cdd_add(z[j], s))
            if not _finite(nz):
                break
            z = nz
            done = step + 1
            if done % stride == 0:
                samples.append(np.array(z, dtype=float))
        return np.array(samples), done
    z = [complex(r[0] + r[1], r[2] + r[3]) for r in np.asarray(z0)]
    h = float(dt)
    done = 0
    for step in range(nsteps):
        k1 = field.eval_d(z)
        k2 = field.eval_d([z[j] + 0.5 * h * k1[j] for j in range(4)])
        k3 = field.eval_d([z[j] + 0.5 * h * k2[j] for j in range(4)])
        k4 = field.eval_d([z[j] + h * k3[j] for j in range(4)])
        nz = [z[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) for j in range(4)]
        if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in nz):
            break
        z = nz
        done = step + 1
        if done % stride == 0:
            samples.append(np.array([[v.real, 0.0, v.imag, 0.0] for v in z]))
    return np.array(samples), done


def _dd_div6(h, l):
    q1 = h / 6.0
    p, e = _two_prod(q1, 6.0)
    r = ((h - p) - e + l) / 6.0
    return _quick_two_sum(q1, r)


def _cdd_div6(a):
    re = _dd_div6(a[0], a[1])
    im = _dd_div6(a[2], a[3])
    return (re[0], re[1], im[0], im[1])


def poly_eval(exps, coefs, Z, dd):
    """Evaluate one polynomial at many points; ``Z`` has shape (m, 4, 4).

    Returns an (m, 4) array in the quadruple layout.
    """
    field = _Field(exps, coefs, [0, len(coefs)])
    out = []
    for z in np.asarray(Z):
        if dd:
            out.append(field.eval_dd([tuple(float(v) for v in row) for row in z])[0])
        else:
            v = field.eval_d([complex(r[0] + r[1], r[2] + r[3]) for r in z])[0]
            out.append((v.real, 0.0, v.imag, 0.0))
    return np.array(out, dtype=float).reshape(-1, 4)
