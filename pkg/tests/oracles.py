"""Slow, literal reference implementations used only as test oracles."""

import numpy as np


def naive_gold(c_init, length):
    """Bit-by-bit evaluation of the Gold recurrences with explicit lists."""
    nc = 1600
    x1 = [0] * (length + nc + 31)
    x2 = [0] * (length + nc + 31)
    x1[0] = 1
    for i in range(31):
        x2[i] = (c_init >> i) & 1
    for n in range(length + nc):
        x1[n + 31] = (x1[n + 3] + x1[n]) % 2
        x2[n + 31] = (x2[n + 3] + x2[n + 2] + x2[n + 1] + x2[n]) % 2
    return np.array([(x1[n + nc] + x2[n + nc]) % 2 for n in range(length)], dtype=np.uint8)


def naive_crc24a(bits):
    """Long division by the CRC-24A generator, one bit at a time."""
    poly = [int(b) for b in format(0x1864CFB, "025b")]
    reg = [int(b) for b in bits] + [0] * 24
    for i in range(len(bits)):
        if reg[i]:
            for j in range(25):
                reg[i + j] ^= poly[j]
    return np.array(reg[-24:], dtype=np.uint8)


def euclidean_argmin(rfh, bank):
    """Minimum-distance candidate, computed with explicit distance sums."""
    best, best_d = 0, None
    for i, s in enumerate(bank):
        d = sum(abs(rfh[k] - s[k]) ** 2 for k in range(len(s)))
        if best_d is None or d < best_d:
            best, best_d = i, d
    return best


def euclidean_argmin_batch(Z, bank):
    """Vectorized minimum-distance decision for rows of complex ``Z``."""
    d = np.sum(np.abs(Z[:, None, :] - bank[None, :, :]) ** 2, axis=-1)
    return np.argmin(d, axis=1)


def ssb_samples(grid, cfg, lead=0, tail=0):
    """Time-domain samples of one SSB, with optional zero padding on each side."""
    from nrbeam.phy.ofdm import modulate_ssb

    return np.concatenate([np.zeros(lead, complex), modulate_ssb(grid, cfg), np.zeros(tail, complex)])


def brute_force_svm_dual(K, y, C):
    """Minimum of 0.5 a'Qa - 1'a over 0 <= a <= C, y'a = 0 by active-set enumeration.

    Every point is tried at its lower bound, upper bound or free; the free
    block is solved from the KKT equations and kept when it is feasible.
    """
    import itertools

    n = len(y)
    Q = (y[:, None] * y[None, :]) * K
    best = np.inf
    for states in itertools.product((0, 1, 2), repeat=n):
        a = np.array([0.0 if s == 0 else C if s == 1 else np.nan for s in states])
        free = np.isnan(a)
        fixed = ~free
        a_f = np.where(fixed, a, 0.0)
        nf = int(free.sum())
        if nf:
            A = np.zeros((nf + 1, nf + 1))
            A[:nf, :nf] = Q[np.ix_(free, free)]
            A[:nf, nf] = y[free]
            A[nf, :nf] = y[free]
            rhs = np.concatenate([1.0 - Q[np.ix_(free, fixed)] @ a_f[fixed], [-(y[fixed] @ a_f[fixed])]])
            sol = np.linalg.lstsq(A, rhs, rcond=None)[0]
            if not np.allclose(A @ sol, rhs, atol=1e-9):
                continue
            a_f[free] = sol[:nf]
        if abs(y @ a_f) > 1e-9 or np.any(a_f < -1e-12) or np.any(a_f > C + 1e-12):
            continue
        best = min(best, 0.5 * a_f @ Q @ a_f - a_f.sum())
    return best


def traverse_tree(tree, x):
    """Walk one tree node by node."""
    node = 0
    while tree.feature[node] >= 0:
        node = tree.left[node] if x[tree.feature[node]] <= tree.threshold[node] else tree.right[node]
    return int(np.argmax(tree.counts[node]))
