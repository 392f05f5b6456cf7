"""Exact symbolic determinants by evaluation, modular elimination and interpolation.

The determinant of a matrix of Gaussian-rational polynomials has, in each
variable, degree at most the sum over rows of that variable's row degree.
So it is fixed by its values on a tensor grid with that many points per axis.
Rows are scaled to integer coefficients.  Every grid value is computed
modulo several primes p = 1 (mod 4), using both square roots of -1 when the
matrix is not real, and recovered by CRT.  The recovery is exact because the
Hadamard bound caps every value.  Interpolating along each axis then gives
the coefficients exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np

from .gaussrat import GaussRat
from .poly import BITS, GPoly, _FIELD

GRID_CAP = 200_000


@lru_cache(maxsize=None)
def _primes(count: int) -> Tuple[Tuple[int, int], ...]:
    """Largest primes p = 1 mod 4 below 2^31 with a square root of -1."""
    out = []
    p = (1 << 31) - 1
    p -= (p - 1) % 4
    while len(out) < count:
        if _is_prime(p):
            out.append((p, _sqrt_minus_one(p)))
        p -= 4
    return tuple(out)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _sqrt_minus_one(p: int) -> int:
    for c in range(2, 200):
        w = pow(c, (p - 1) // 4, p)
        if w * w % p == p - 1:
            return w
    raise ArithmeticError("no square root of -1 found")


def _powmod_vec(x: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.ones_like(x)
    base = x % p
    while e:
        if e & 1:
            out = out * base % p
        base = base * base % p
        e >>= 1
    return out


def batched_det_mod(A: np.ndarray, p: int) -> np.ndarray:
    """Determinants mod p of a stack of int64 matrices with entries in [0, p)."""
    A = A.copy()
    nb, n, _ = A.shape
    det = np.ones(nb, dtype=np.int64)
    rows = np.arange(nb)
    for k in range(n):
        nz = A[:, k:, k] != 0
        has = nz.any(axis=1)
        piv = np.argmax(nz, axis=1) + k
        swap = (piv != k) & has
        if swap.any():
            r = rows[swap]
            pk = A[r, k].copy()
            A[r, k] = A[r, piv[swap]]
            A[r, piv[swap]] = pk
            det[swap] = (p - det[swap]) % p
        pv = A[:, k, k]
        det = det * pv % p
        if k == n - 1:
            break
        inv = _powmod_vec(pv, p - 2, p)
        f = (p - A[:, k + 1:, k] * inv[:, None] % p) % p
        A[:, k + 1:, k + 1:] = (A[:, k + 1:, k + 1:] + f[:, :, None] * A[:, None, k, k + 1:]) % p
    return det


def _unpack(mono: int) -> Dict[int, int]:
    out = {}
    k = 0
    while mono:
        e = mono & _FIELD
        if e:
            out[k] = e
        mono >>= BITS
        k += 1
    return out


def det_interpolated(size: int, entries: Dict[Tuple[int, int], GPoly], grid_cap: int = GRID_CAP) -> GPoly:
    """Exact determinant of a sparse GPoly matrix (see module docstring)."""
    n = size
    if n == 0:
        return GPoly.one()
    entries = _realize(n, entries)
    # row scaling to integer coefficients
    scale = [1] * n
    for (i, j), p in entries.items():
        for d in (p.re, p.im):
            for c in d.values():
                if isinstance(c, Fraction):
                    scale[i] = scale[i] * c.denominator // math.gcd(scale[i], c.denominator)
    # variable degree bounds
    row_deg: Dict[int, List[int]] = {}
    col_deg: Dict[int, List[int]] = {}
    real = True
    for (i, j), p in entries.items():
        if p.im:
            real = False
        for m in p.monomials():
            for v, e in _unpack(m).items():
                row_deg.setdefault(v, [0] * n)
                col_deg.setdefault(v, [0] * n)
                row_deg[v][i] = max(row_deg[v][i], e)
                col_deg[v][j] = max(col_deg[v][j], e)
    variables = sorted(row_deg)
    degs = [min(sum(row_deg[v]), sum(col_deg[v])) for v in variables]
    shape = tuple(d + 1 for d in degs)
    npts = int(np.prod(shape)) if shape else 1
    if npts > grid_cap:
        raise OverflowError(f"interpolation grid of {npts} points exceeds cap {grid_cap}")
    axes = [np.arange(d + 1, dtype=np.int64) - d // 2 for d in degs]
    amax = [max(abs(int(a[0])), abs(int(a[-1]))) for a in axes]
    # Hadamard bound on |det| of the scaled matrix over the grid
    norm2 = [0] * n
    for (i, j), p in entries.items():
        bound = 0
        for m in p.monomials():
            c = p.coeff(m)
            mag = (abs(c.re) + abs(c.im)) * scale[i]
            for v, e in _unpack(m).items():
                mag *= amax[variables.index(v)] ** e
            bound += mag
        norm2[i] += math.ceil(bound) ** 2
    H = 1
    for s in norm2:
        H *= math.isqrt(s) + 1
    nprimes = 1
    while True:
        modulus = 1
        for p, _ in _primes(nprimes):
            modulus *= p
        if modulus > 2 * H + 2:
            break
        nprimes += 1
    primes = _primes(nprimes)
    # grid coordinates broadcast per variable
    mesh = []
    for k in range(len(variables)):
        shp = [1] * len(variables)
        shp[k] = shape[k]
        mesh.append(axes[k].reshape(shp))
    results_re, results_im = [], []
    for p, w in primes:
        embeds = (w,) if real else (w, p - w)
        vals = []
        for om in embeds:
            A = np.zeros((npts, n, n), dtype=np.int64)
            for (i, j), poly in entries.items():
                acc = np.zeros(shape if shape else (), dtype=np.int64)
                for m in poly.monomials():
                    c = poly.coeff(m)
                    cr, ci = c.re * scale[i], c.im * scale[i]
                    cm = (int(cr) + int(ci) * om) % p
                    term = np.full(shape if shape else (), cm, dtype=np.int64)
                    for v, e in _unpack(m).items():
                        k = variables.index(v)
                        term = term * _powmod_vec(mesh[k] % p, e, p) % p
                    acc = (acc + term) % p
                A[:, i, j] = np.broadcast_to(acc, shape).reshape(-1) if shape else acc
            vals.append(batched_det_mod(A, p))
        if real:
            results_re.append(vals[0])
            results_im.append(np.zeros_like(vals[0]))
        else:
            inv2 = pow(2, p - 2, p)
            inv2w = pow(2 * w, p - 2, p)
            s1, s2 = vals
            results_re.append((s1 + s2) % p * inv2 % p)
            results_im.append((s1 - s2) % p * inv2w % p)
    re = _crt([r.tolist() for r in results_re], [p for p, _ in primes])
    im = _crt([r.tolist() for r in results_im], [p for p, _ in primes])
    cre = _interpolate(re, shape, axes)
    cim = _interpolate(im, shape, axes)
    total_scale = 1
    for s in scale:
        total_scale *= s
    out_re: Dict[int, object] = {}
    out_im: Dict[int, object] = {}
    for idx in np.ndindex(*shape) if shape else [()]:
        mono = 0
        for k, e in enumerate(idx):
            if e:
                mono += e << (variables[k] * BITS)
        a = cre[idx] if shape else cre
        b = cim[idx] if shape else cim
        if a:
            out_re[mono] = Fraction(a, total_scale)
        if b:
            out_im[mono] = Fraction(b, total_scale)
    return GPoly(out_re, out_im)


def _realize(n: int, entries):
    """Conjugate by a diagonal of powers of i so that every entry becomes real.

    Possible when each entry is a real polynomial times a power of i and the
    parities of those powers are consistent around every cycle.  The
    determinant is unchanged; on failure the entries are returned as given.
    """
    par = {}
    for ij, p in entries.items():
        if not p.im:
            par[ij] = 0
        elif not p.re:
            par[ij] = 1
        else:
            return entries
    adj: Dict[int, List[Tuple[int, int]]] = {}
    for (i, j), t in par.items():
        adj.setdefault(i, []).append((j, t))
        adj.setdefault(j, []).append((i, t))
    s = {}
    for root in range(n):
        if root in s:
            continue
        s[root] = 0
        stack = [root]
        while stack:
            u = stack.pop()
            for w, t in adj.get(u, ()):
                want = (s[u] + t) & 1
                if w not in s:
                    s[w] = want
                    stack.append(w)
                elif s[w] != want:
                    return entries
    # entry (i, j) becomes i^{s_j - s_i} * A_ij
    out = {}
    for (i, j), p in entries.items():
        k = (s[j] - s[i]) % 4
        out[(i, j)] = p if k == 0 else p * GPoly.const(GaussRat(0, 1) if k == 1 else GaussRat(0, -1))
    return out


def _crt(residues: List[List[int]], primes: List[int]):
    M = 1
    for p in primes:
        M *= p
    out = [0] * len(residues[0])
    for r, p in zip(residues, primes):
        Mi = M // p
        c = Mi * pow(Mi, -1, p)
        for k, x in enumerate(r):
            out[k] += x * c
    half = M // 2
    res = []
    for x in out:
        x %= M
        res.append(x - M if x > half else x)
    return res


def _interpolate(values: List[int], shape, axes):
    """Tensor-grid interpolation; returns an object array of exact coefficients."""
    if not shape:
        return values[0]
    arr = np.empty(len(values), dtype=object)
    arr[:] = values
    arr = arr.reshape(shape)
    den = 1
    for k, pts in enumerate(axes):
        Vinv, d = _vandermonde_inverse(tuple(int(t) for t in pts))
        arr = np.moveaxis(np.tensordot(Vinv, arr, axes=([1], [k])), 0, k)
        den *= d
    if den != 1:
        flat = arr.reshape(-1)
        for k in range(flat.size):
            if flat[k]:
                flat[k] = Fraction(flat[k], den)
        arr = flat.reshape(shape)
    return arr


@lru_cache(maxsize=None)
def _vandermonde_inverse(points: Tuple[int, ...]):
    """Integer matrix W and denominator d with W/d the inverse Vandermonde."""
    m = len(points)
    V = [[Fraction(t) ** k for k in range(m)] for t in points]
    a = [row + [Fraction(int(i == j)) for j in range(m)] for i, row in enumerate(V)]
    for k in range(m):
        piv = next(i for i in range(k, m) if a[i][k])
        a[k], a[piv] = a[piv], a[k]
        inv = 1 / a[k][k]
        a[k] = [x * inv for x in a[k]]
        for i in range(m):
            if i != k and a[i][k]:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    inv = [r[m:] for r in a]  # inverse of V: coefficients = inv @ values
    d = 1
    for row in inv:
        for x in row:
            d = d * x.denominator // math.gcd(d, x.denominator)
    W = np.empty((m, m), dtype=object)
    for i in range(m):
        for j in range(m):
            W[i, j] = int(inv[i][j] * d)
    return W, d
