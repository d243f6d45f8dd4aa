"""Reference computations written independently of the library code paths.

Everything here uses explicit index loops or textbook formulas so that
tests comparing against it are not comparing the library with itself.
"""

import math

import numpy as np

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
PAULIS = (X, Y, Z)


def kron_loops(a, b):
    a, b = np.asarray(a), np.asarray(b)
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k, j * cb + l] = a[i, j] * b[k, l]
    return out


def ptrace_loops(m, n, k, keep):
    m = np.asarray(m)
    if keep == 1:
        out = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                out[i, j] = sum(m[i * k + t, j * k + t] for t in range(k))
    else:
        out = np.zeros((k, k), dtype=complex)
        for i in range(k):
            for j in range(k):
                out[i, j] = sum(m[t * k + i, t * k + j] for t in range(n))
    return out


def ptranspose_loops(m, n, k):
    """Transpose on the second factor: <i a| T |j b> = <i b| m |j a>."""
    m = np.asarray(m)
    out = np.zeros_like(m, dtype=complex)
    for i in range(n):
        for j in range(n):
            for a in range(k):
                for b in range(k):
                    out[i * k + a, j * k + b] = m[i * k + b, j * k + a]
    return out


def sm_direct(m, n, k):
    m = np.asarray(m)
    diff = m - kron_loops(ptrace_loops(m, n, k, 1), ptrace_loops(m, n, k, 2))
    return float(sum(abs(z) ** 2 for z in diff.ravel()))


def schmidt_rank(psi, n, k, tol=1e-8):
    s = np.linalg.svd(np.asarray(psi).reshape(n, k), compute_uv=False)
    return int(np.sum(s > tol))


def werner_matrix(p):
    """p |phi+><phi+| + (1-p) I/4 written out entry by entry."""
    m = np.eye(4, dtype=complex) * (1 - p) / 4
    for i in (0, 3):
        for j in (0, 3):
            m[i, j] += p / 2
    return m


def binary_entropy(ps):
    return -sum(p * math.log(p) for p in ps if p > 0)
