# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops; semantics mirror ``_pykernels`` exactly."""


def agent_events(
    signed char[::1] states,
    long long[::1] counts,
    double t,
    double horizon,
    const double[::1] dt,
    const long long[::1] idx,
    const signed char[::1] buy,
    const signed char[::1] pref,
    double[::1] out_t,
    long long[::1] out_cn,
    long long[::1] out_ce,
):
    cdef Py_ssize_t i, m = dt.shape[0], rec = 0
    cdef long long a, k
    cdef signed char s
    cdef double tn
    cdef bint done = False
    for i in range(m):
        tn = t + dt[i]
        if tn > horizon:
            done = True
            break
        t = tn
        a = idx[i]
        s = states[a]
        k = counts[1]
        if s == 0:
            if buy[k]:
                states[a] = 1
                counts[0] -= 1
                counts[1] += 1
            else:
                continue
        elif s == 1:
            if pref[k] < 0:
                states[a] = 2
                counts[1] -= 1
                counts[2] += 1
            else:
                continue
        else:
            if pref[k] > 0:
                states[a] = 1
                counts[2] -= 1
                counts[1] += 1
            else:
                continue
        out_t[rec] = t
        out_cn[rec] = counts[0]
        out_ce[rec] = counts[1]
        rec += 1
    return t, rec, done

