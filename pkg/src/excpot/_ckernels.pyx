# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; mirrors ``excpot._purepy``.

Complex double-double values use the float64 quadruple layout
``(re_hi, re_lo, im_hi, im_lo)``.  Error-free transforms use Dekker
splitting, so the module must not be built with -ffast-math.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport isfinite
from math import gcd

cnp.import_array()

NAME = "cython"

# -- exact sparse elimination over Z[i] ----------------------------------------

cdef dict _combine(object pc, dict R, object rc, dict P):
    cdef object a = pc[0], b = pc[1], c = rc[0], d = rc[1]
    cdef dict out = {}
    cdef object x, y, u, v, nu, nv, cur, g
    for col, xy in R.items():
        x = xy[0]
        y = xy[1]
        out[col] = (a * x - b * y, a * y + b * x)
    for col, xy in P.items():
        x = xy[0]
        y = xy[1]
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
    for xy in out.values():
        g = gcd(g, xy[0], xy[1])
        if g == 1:
            return out
    if g > 1:
        out = {col: (xy[0] // g, xy[1] // g) for col, xy in out.items()}
    return out


def gauss_jordan(rows, columns):
    cdef list rs = [dict(r) for r in rows]
    cdef dict where = {}
    cdef dict pivots = {}
    cdef set used = set()
    cdef Py_ssize_t idx, p
    cdef dict R, P, new
    for idx in range(len(rs)):
        for col in rs[idx]:
            s = where.get(col)
            if s is None:
                where[col] = {idx}
            else:
                s.add(idx)
    for col in columns:
        holders = where.get(col)
        if not holders:
            continue
        p = -1
        for r in holders:
            if r not in used and (p < 0 or r < p):
                p = r
        if p < 0:
            continue
        used.add(p)
        pivots[col] = p
        P = rs[p]
        pc = P[col]
        for r in sorted(holders):
            if r == p:
                continue
            R = rs[r]
            new = _combine(pc, R, R[col], P)
            for c2 in R:
                if c2 not in new:
                    where[c2].discard(r)
            for c2 in new:
                if c2 not in R:
                    s = where.get(c2)
                    if s is None:
                        where[c2] = {r}
                    else:
                        s.add(r)
            rs[r] = new
    return pivots, rs


# -- double-double arithmetic ------------------------------------------------

cdef struct dd:
    double hi
    double lo

cdef struct cdd:
    dd re
    dd im

cdef double SPLIT = 134217729.0

cdef inline dd two_sum(double a, double b) nogil:
    cdef dd r
    cdef double s = a + b
    cdef double bb = s - a
    r.hi = s
    r.lo = (a - (s - bb)) + (b - bb)
    return r

cdef inline dd quick_two_sum(double a, double b) nogil:
    cdef dd r
    cdef double s = a + b
    r.hi = s
    r.lo = b - (s - a)
    return r

cdef inline dd two_prod(double a, double b) nogil:
    cdef dd r
    cdef double p = a * b
    cdef double t, ah, al, bh, bl
    r.hi = p
    if not isfinite(p):
        r.lo = 0.0
        return r
    t = SPLIT * a
    ah = t - (t - a)
    al = a - ah
    t = SPLIT * b
    bh = t - (t - b)
    bl = b - bh
    r.lo = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return r

cdef inline dd dd_add(dd a, dd b) nogil:
    cdef dd s = two_sum(a.hi, b.hi)
    cdef dd t = two_sum(a.lo, b.lo)
    cdef double e = s.lo + t.hi
    s = quick_two_sum(s.hi, e)
    e = s.lo + t.lo
    return quick_two_sum(s.hi, e)

cdef inline dd dd_neg(dd a) nogil:
    a.hi = -a.hi
    a.lo = -a.lo
    return a

cdef inline dd dd_mul(dd a, dd b) nogil:
    cdef dd p = two_prod(a.hi, b.hi)
    cdef double e = p.lo + (a.hi * b.lo + a.lo * b.hi)
    return quick_two_sum(p.hi, e)

cdef inline dd dd_div6(dd a) nogil:
    cdef double q1 = a.hi / 6.0
    cdef dd p = two_prod(q1, 6.0)
    cdef double r = ((a.hi - p.hi) - p.lo + a.lo) / 6.0
    return quick_two_sum(q1, r)

cdef inline cdd cdd_add(cdd a, cdd b) nogil:
    cdef cdd r
    r.re = dd_add(a.re, b.re)
    r.im = dd_add(a.im, b.im)
    return r

cdef inline cdd cdd_mul(cdd a, cdd b) nogil:
    cdef cdd r
    r.re = dd_add(dd_mul(a.re, b.re), dd_neg(dd_mul(a.im, b.im)))
    r.im = dd_add(dd_mul(a.re, b.im), dd_mul(a.im, b.re))
    return r

cdef inline cdd cdd_scale(cdd a, double s) nogil:
    cdef cdd r
    cdef dd sd
    sd.hi = s
    sd.lo = 0.0
    r.re = dd_mul(a.re, sd)
    r.im = dd_mul(a.im, sd)
    return r

cdef inline cdd cdd_div6(cdd a) nogil:
    cdef cdd r
    r.re = dd_div6(a.re)
    r.im = dd_div6(a.im)
    return r

cdef inline bint cdd_finite(cdd a) nogil:
    return isfinite(a.re.hi) and isfinite(a.re.lo) and isfinite(a.im.hi) and isfinite(a.im.lo)

# plain complex doubles, same operation order as Python's complex type
cdef struct cd:
    double re
    double im

cdef inline cd cd_mul(cd a, cd b) nogil:
    cdef cd r
    r.re = a.re * b.re - a.im * b.im
    r.im = a.re * b.im + a.im * b.re
    return r

cdef inline cd cd_add(cd a, cd b) nogil:
    cdef cd r
    r.re = a.re + b.re
    r.im = a.im + b.im
    return r

cdef inline cd cd_scale(cd a, double s) nogil:
    cdef cd r
    r.re = s * a.re - 0.0 * a.im
    r.im = s * a.im + 0.0 * a.re
    return r


cdef class _Field:
    cdef long[:, ::1] exps
    cdef double[:, ::1] coefs
    cdef long[::1] offsets
    cdef int nf
    cdef int maxdeg[4]
    cdef int stride
    cdef cdd[:, ::1] pw_dd_store
    cdef object pw_dd_arr
    cdef object pw_d_arr
    cdef cd* pw_d

    def __init__(self, exps, coefs, offsets):
        self.exps = np.ascontiguousarray(exps, dtype=np.int64).reshape(-1, 4)
        self.coefs = np.ascontiguousarray(coefs, dtype=np.float64).reshape(-1, 4)
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        self.nf = len(offsets) - 1
        cdef int j, t
        m = 0
        for j in range(4):
            self.maxdeg[j] = 0
            for t in range(self.exps.shape[0]):
                if self.exps[t, j] > self.maxdeg[j]:
                    self.maxdeg[j] = self.exps[t, j]
            if self.maxdeg[j] > m:
                m = self.maxdeg[j]
        self.stride = m + 1
        # cdd is 4 doubles; store power tables in float64 buffers
        self.pw_dd_arr = np.zeros((4 * self.stride, 4), dtype=np.float64)
        self.pw_d_arr = np.zeros((4 * self.stride, 2), dtype=np.float64)

    cdef void eval_dd(self, cdd* z, cdd* out):
        cdef double[:, ::1] buf = self.pw_dd_arr
        cdef cdd* pw = <cdd*> &buf[0, 0]
        cdef int j, n, f, jj
        cdef long t
        cdef cdd term, acc, c
        cdef cdd one
        one.re.hi = 1.0; one.re.lo = 0.0; one.im.hi = 0.0; one.im.lo = 0.0
        for j in range(4):
            pw[j * self.stride] = one
            for n in range(1, self.maxdeg[j] + 1):
                pw[j * self.stride + n] = cdd_mul(pw[j * self.stride + n - 1], z[j])
        for f in range(self.nf):
            acc.re.hi = 0.0; acc.re.lo = 0.0; acc.im.hi = 0.0; acc.im.lo = 0.0
            for t in range(self.offsets[f], self.offsets[f + 1]):
                term.re.hi = self.coefs[t, 0]
                term.re.lo = self.coefs[t, 1]
                term.im.hi = self.coefs[t, 2]
                term.im.lo = self.coefs[t, 3]
                for jj in range(4):
                    if self.exps[t, jj]:
                        term = cdd_mul(term, pw[jj * self.stride + self.exps[t, jj]])
                acc = cdd_add(acc, term)
            out[f] = acc

    cdef void eval_d(self, cd* z, cd* out):
        cdef double[:, ::1] buf = self.pw_d_arr
        cdef cd* pw = <cd*> &buf[0, 0]
        cdef int j, n, f
        cdef long t
        cdef cd term, acc, one
        one.re = 1.0
        one.im = 0.0
        for j in range(4):
            pw[j * self.stride] = one
            for n in range(1, self.maxdeg[j] + 1):
                pw[j * self.stride + n] = cd_mul(pw[j * self.stride + n - 1], z[j])
        for f in range(self.nf):
            acc.re = 0.0
            acc.im = 0.0
            for t in range(self.offsets[f], self.offsets[f + 1]):
                term.re = self.coefs[t, 0] + self.coefs[t, 1]
                term.im = self.coefs[t, 2] + self.coefs[t, 3]
                term = cd_mul(term, pw[self.exps[t, 0]])
                term = cd_mul(term, pw[self.stride + self.exps[t, 1]])
                term = cd_mul(term, pw[2 * self.stride + self.exps[t, 2]])
                term = cd_mul(term, pw[3 * self.stride + self.exps[t, 3]])
                acc = cd_add(acc, term)
            out[f] = acc


def rk4_integrate(exps, coefs, offsets, z0, double dt, long nsteps, long stride, bint dd):
    cdef _Field field = _Field(exps, coefs, offsets)
    if field.nf != 4:
        raise ValueError("vector field must have 4 components")
    if stride < 1:
        stride = 1
    cdef double[:, ::1] z0v = np.ascontiguousarray(z0, dtype=np.float64).reshape(4, 4)
    cdef long nsamp = nsteps // stride + 1
    out_arr = np.zeros((nsamp, 4, 4), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef cdd z[4]
    cdef cdd tmp[4]
    cdef cdd k1[4]
    cdef cdd k2[4]
    cdef cdd k3[4]
    cdef cdd k4[4]
    cdef cdd nz[4]
    cdef cdd s
    cdef cd zd[4]
    cdef cd td[4]
    cdef cd d1[4]
    cdef cd d2[4]
    cdef cd d3[4]
    cdef cd d4[4]
    cdef cd nd[4]
    cdef int j
    cdef long step, done = 0, si = 0
    cdef double half = dt / 2.0
    cdef bint ok
    for j in range(4):
        out[0, j, 0] = z0v[j, 0]
        out[0, j, 1] = z0v[j, 1]
        out[0, j, 2] = z0v[j, 2]
        out[0, j, 3] = z0v[j, 3]
    if dd:
        for j in range(4):
            z[j].re.hi = z0v[j, 0]; z[j].re.lo = z0v[j, 1]
            z[j].im.hi = z0v[j, 2]; z[j].im.lo = z0v[j, 3]
        for step in range(nsteps):
            field.eval_dd(z, k1)
            for j in range(4):
                tmp[j] = cdd_add(z[j], cdd_scale(k1[j], half))
            field.eval_dd(tmp, k2)
            for j in range(4):
                tmp[j] = cdd_add(z[j], cdd_scale(k2[j], half))
            field.eval_dd(tmp, k3)
            for j in range(4):
                tmp[j] = cdd_add(z[j], cdd_scale(k3[j], dt))
            field.eval_dd(tmp, k4)
            ok = True
            for j in range(4):
                s = cdd_add(k1[j], k4[j])
                s = cdd_add(s, cdd_scale(cdd_add(k2[j], k3[j]), 2.0))
                s = cdd_scale(s, dt)
                s = cdd_div6(s)
                nz[j] = cdd_add(z[j], s)
                if not cdd_finite(nz[j]):
                    ok = False
            if not ok:
                break
            for j in range(4):
                z[j] = nz[j]
            done = step + 1
            if done % stride == 0:
                si += 1
                for j in range(4):
                    out[si, j, 0] = z[j].re.hi
                    out[si, j, 1] = z[j].re.lo
                    out[si, j, 2] = z[j].im.hi
                    out[si, j, 3] = z[j].im.lo
    else:
        for j in range(4):
            zd[j].re = z0v[j, 0] + z0v[j, 1]
            zd[j].im = z0v[j, 2] + z0v[j, 3]
        for step in range(nsteps):
            field.eval_d(zd, d1)
            for j in range(4):
                td[j] = cd_add(zd[j], cd_scale(d1[j], 0.5 * dt))
            field.eval_d(td, d2)
            for j in range(4):
                td[j] = cd_add(zd[j], cd_scale(d2[j], 0.5 * dt))
            field.eval_d(td, d3)
            for j in range(4):
                td[j] = cd_add(zd[j], cd_scale(d3[j], dt))
            field.eval_d(td, d4)
            ok = True
            for j in range(4):
                nd[j].re = d1[j].re + 2.0 * d2[j].re
                nd[j].im = d1[j].im + 2.0 * d2[j].im
                nd[j].re = nd[j].re + 2.0 * d3[j].re
                nd[j].im = nd[j].im + 2.0 * d3[j].im
                nd[j].re = nd[j].re + d4[j].re
                nd[j].im = nd[j].im + d4[j].im
                nd[j] = cd_add(zd[j], cd_scale(nd[j], dt / 6.0))
                if not (isfinite(nd[j].re) and isfinite(nd[j].im)):
                    ok = False
            if not ok:
                break
            for j in range(4):
                zd[j] = nd[j]
            done = step + 1
            if done % stride == 0:
                si += 1
                for j in range(4):
                    out[si, j, 0] = zd[j].re
                    out[si, j, 1] = 0.0
                    out[si, j, 2] = zd[j].im
                    out[si, j, 3] = 0.0
    return out_arr[: si + 1].copy(), done


def poly_eval(exps, coefs, Z, bint dd):
    cdef _Field field = _Field(exps, coefs, np.array([0, len(coefs)], dtype=np.int64))
    cdef double[:, :, ::1] Zv = np.ascontiguousarray(Z, dtype=np.float64).reshape(-1, 4, 4)
    cdef Py_ssize_t m = Zv.shape[0], i
    out_arr = np.zeros((m, 4), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef cdd z[4]
    cdef cdd r[1]
    cdef cd zd[4]
    cdef cd rd[1]
    cdef int j
    for i in range(m):
        if dd:
            for j in range(4):
                z[j].re.hi = Zv[i, j, 0]; z[j].re.lo = Zv[i, j, 1]
                z[j].im.hi = Zv[i, j, 2]; z[j].im.lo = Zv[i, j, 3]
            field.eval_dd(z, r)
            out[i, 0] = r[0].re.hi
            out[i, 1] = r[0].re.lo
            out[i, 2] = r[0].im.hi
            out[i, 3] = r[0].im.lo
        else:
            for j in range(4):
                zd[j].re = Zv[i, j, 0] + Zv[i, j, 1]
                zd[j].im = Zv[i, j, 2] + Zv[i, j, 3]
            field.eval_d(zd, rd)
            out[i, 0] = rd[0].re
            out[i, 2] = rd[0].im
    return out_arr
