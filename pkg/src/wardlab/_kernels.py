"""Hot numeric kernels, in two interchangeable lanes.

Every kernel has a pure-numpy implementation (suffix ``_np``) and, when
numba is importable, an ``@njit`` twin (suffix ``_nb``).  The public
unsuffixed names are bound to one lane at import time:

* default: numba lane when numba imports cleanly;
* ``WARDLAB_NO_NUMBA=1`` in the environment forces the numpy lane.

The two lanes are bit-identical, not merely close: float accumulations
are performed in the same left-to-right order on both sides (numpy via
seeded ``ufunc.accumulate``, which is sequential by definition), and the
counting kernels are pure integer work.  ``tests/test_kernels.py`` pins
this equivalence and ``benchmarks/bench_kernels.py`` compares speed.
"""

import os

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV53 = 1.0 / float(1 << 53)


# ---------------------------------------------------------------- numpy lane

def count_ge_np(values, center, eps):
    """|{i : |values[i] - center| >= eps}| by exact comparison (no fuzz band)."""
    return int(np.count_nonzero(np.abs(values - center) >= eps))


def prefix_counts_np(values, center, eps, cuts):
    """Deviation counts over the prefixes values[:c] for each c in `cuts`.

    `cuts` must be ascending, each in [0, len(values)].
    """
    mask = np.abs(values - center) >= eps
    cum = np.cumsum(mask)
    cuts = np.asarray(cuts, dtype=np.int64)
    out = np.zeros(len(cuts), dtype=np.int64)
    nz = cuts > 0
    out[nz] = cum[cuts[nz] - 1]
    return out


def harmonic_extend_np(k0, k1, seed):
    """Partial sums seed + 1/k0 + ... + 1/k for k in [k0, k1], left to right."""
    ks = np.arange(k0, k1 + 1, dtype=np.float64)
    return np.add.accumulate(np.concatenate(([seed], 1.0 / ks)))[1:]


def nested_harmonic_extend_np(k0, k1, seed_h, seed_t):
    """Extend h_k = h_{k-1} + 1/k and t_k = t_{k-1} + h_k/k over [k0, k1]."""
    ks = np.arange(k0, k1 + 1, dtype=np.float64)
    h = np.add.accumulate(np.concatenate(([seed_h], 1.0 / ks)))[1:]
    t = np.add.accumulate(np.concatenate(([seed_t], h / ks)))[1:]
    return h, t


def parity_extend_np(flags, seed):
    """Running XOR of uint8 flags with an initial state."""
    return np.bitwise_xor.accumulate(
        np.concatenate(([np.uint8(seed)], flags.astype(np.uint8)))
    )[1:]


def splitmix_uniform_np(ns, seed):
    """Order-independent per-index uniforms in [0, 1) from a splitmix64 hash."""
    z = (np.asarray(ns, dtype=np.uint64) + np.uint64(seed)) * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _INV53


def max_abs_dev_np(values, center):
    """(max |v - center|, first index attaining it)."""
    d = np.abs(values - center)
    i = int(np.argmax(d))
    return float(d[i]), i


def find_first_above_np(values, threshold, lo):
    """First position >= lo with |values[pos]| > threshold, else -1."""
    tail = np.abs(values[lo:]) > threshold
    if not tail.any():
        return -1
    return lo + int(np.argmax(tail))


def power_series_chunk_np(coeffs, x, acc, pw):
    """Accumulate sum(coeffs[i] * pw * x**i) with a running power.

    Returns (new_acc, new_pw) where new_pw = pw * x**len(coeffs), computed
    by repeated multiplication so both lanes share the rounding path.
    """
    m = len(coeffs)
    steps = np.full(m + 1, x, dtype=np.float64)
    steps[0] = pw
    pws = np.multiply.accumulate(steps)
    terms = coeffs * pws[:m]
    new_acc = np.add.accumulate(np.concatenate(([acc], terms)))[-1]
    return float(new_acc), float(pws[m])


_NUMPY_LANE = {
    "count_ge": count_ge_np,
    "prefix_counts": prefix_counts_np,
    "harmonic_extend": harmonic_extend_np,
    "nested_harmonic_extend": nested_harmonic_extend_np,
    "parity_extend": parity_extend_np,
    "splitmix_uniform": splitmix_uniform_np,
    "max_abs_dev": max_abs_dev_np,
    "find_first_above": find_first_above_np,
    "power_series_chunk": power_series_chunk_np,
}


# ---------------------------------------------------------------- numba lane

def _build_numba_lane():
    from numba import njit

    @njit(cache=True)
    def count_ge_nb(values, center, eps):
        c = 0
        for i in range(values.shape[0]):
            if abs(values[i] - center) >= eps:
                c += 1
        return c

    @njit(cache=True)
    def prefix_counts_nb(values, center, eps, cuts):
        out = np.zeros(cuts.shape[0], dtype=np.int64)
        c = 0
        j = 0
        n = values.shape[0]
        while j < cuts.shape[0] and cuts[j] == 0:
            j += 1
        for i in range(n):
            if abs(values[i] - center) >= eps:
                c += 1
            while j < cuts.shape[0] and cuts[j] == i + 1:
                out[j] = c
                j += 1
        return out

    @njit(cache=True)
    def harmonic_extend_nb(k0, k1, seed):
        m = k1 - k0 + 1
        out = np.empty(m, dtype=np.float64)
        acc = seed
        for i in range(m):
            acc = acc + 1.0 / np.float64(k0 + i)
            out[i] = acc
        return out

    @njit(cache=True)
    def nested_harmonic_extend_nb(k0, k1, seed_h, seed_t):
        m = k1 - k0 + 1
        h = np.empty(m, dtype=np.float64)
        t = np.empty(m, dtype=np.float64)
        ah = seed_h
        at = seed_t
        for i in range(m):
            k = np.float64(k0 + i)
            ah = ah + 1.0 / k
            at = at + ah / k
            h[i] = ah
            t[i] = at
        return h, t

    @njit(cache=True)
    def parity_extend_nb(flags, seed):
        out = np.empty(flags.shape[0], dtype=np.uint8)
        acc = seed
        for i in range(flags.shape[0]):
            acc = acc ^ flags[i]
            out[i] = acc
        return out

    @njit(cache=True)
    def splitmix_uniform_nb(ns, seed):
        out = np.empty(ns.shape[0], dtype=np.float64)
        for i in range(ns.shape[0]):
            z = (ns[i] + seed) * np.uint64(0x9E3779B97F4A7C15)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            z = z ^ (z >> np.uint64(31))
            out[i] = np.float64(z >> np.uint64(11)) * (1.0 / 9007199254740992.0)
        return out

    @njit(cache=True)
    def max_abs_dev_nb(values, center):
        best = -1.0
        arg = 0
        for i in range(values.shape[0]):
            d = abs(values[i] - center)
            if d > best:
                best = d
                arg = i
        return best, arg

    @njit(cache=True)
    def find_first_above_nb(values, threshold, lo):
        for i in range(lo, values.shape[0]):
            if abs(values[i]) > threshold:
                return i
        return -1

    @njit(cache=True)
    def power_series_chunk_nb(coeffs, x, acc, pw):
        a = acc
        p = pw
        for i in range(coeffs.shape[0]):
            a = a + coeffs[i] * p
            p = p * x
        return a, p

    return {
        "count_ge": count_ge_nb,
        "prefix_counts": prefix_counts_nb,
        "harmonic_extend": harmonic_extend_nb,
        "nested_harmonic_extend": nested_harmonic_extend_nb,
        "parity_extend": parity_extend_nb,
        "splitmix_uniform": splitmix_uniform_nb,
        "max_abs_dev": max_abs_dev_nb,
        "find_first_above": find_first_above_nb,
        "power_series_chunk": power_series_chunk_nb,
    }


def _wrap_nb(lane):
    """Adapt argument dtypes so the numba lane accepts the same calls."""

    def count_ge(values, center, eps):
        return int(lane["count_ge"](np.ascontiguousarray(values, np.float64),
                                    float(center), float(eps)))

    def prefix_counts(values, center, eps, cuts):
        return lane["prefix_counts"](np.ascontiguousarray(values, np.float64),
                                     float(center), float(eps),
                                     np.asarray(cuts, dtype=np.int64))

    def harmonic_extend(k0, k1, seed):
        return lane["harmonic_extend"](np.int64(k0), np.int64(k1), float(seed))

    def nested_harmonic_extend(k0, k1, seed_h, seed_t):
        return lane["nested_harmonic_extend"](np.int64(k0), np.int64(k1),
                                              float(seed_h), float(seed_t))

    def parity_extend(flags, seed):
        return lane["parity_extend"](np.ascontiguousarray(flags, np.uint8),
                                     np.uint8(seed))

    def splitmix_uniform(ns, seed):
        return lane["splitmix_uniform"](np.ascontiguousarray(ns, np.uint64),
                                        np.uint64(seed))

    def max_abs_dev(values, center):
        m, i = lane["max_abs_dev"](np.ascontiguousarray(values, np.float64),
                                   float(center))
        return float(m), int(i)

    def find_first_above(values, threshold, lo):
        return int(lane["find_first_above"](
            np.ascontiguousarray(values, np.float64), float(threshold),
            np.int64(lo)))

    def power_series_chunk(coeffs, x, acc, pw):
        a, p = lane["power_series_chunk"](
            np.ascontiguousarray(coeffs, np.float64), float(x), float(acc),
            float(pw))
        return float(a), float(p)

    return {
        "count_ge": count_ge,
        "prefix_counts": prefix_counts,
        "harmonic_extend": harmonic_extend,
        "nested_harmonic_extend": nested_harmonic_extend,
        "parity_extend": parity_extend,
        "splitmix_uniform": splitmix_uniform,
        "max_abs_dev": max_abs_dev,
        "find_first_above": find_first_above,
        "power_series_chunk": power_series_chunk,
    }


def _select_lane():
    if os.environ.get("WARDLAB_NO_NUMBA", "") == "1":
        return "numpy", _NUMPY_LANE
    try:
        lane = _build_numba_lane()
    except ImportError:
        return "numpy", _NUMPY_LANE
    return "numba", _wrap_nb(lane)


ACTIVE_LANE, _lane = _select_lane()

count_ge = _lane["count_ge"]
prefix_counts = _lane["prefix_counts"]
harmonic_extend = _lane["harmonic_extend"]
nested_harmonic_extend = _lane["nested_harmonic_extend"]
parity_extend = _lane["parity_extend"]
splitmix_uniform = _lane["splitmix_uniform"]
max_abs_dev = _lane["max_abs_dev"]
find_first_above = _lane["find_first_above"]
power_series_chunk = _lane["power_series_chunk"]
