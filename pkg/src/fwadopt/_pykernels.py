"""Pure-Python version of the compiled inner loop."""

from __future__ import annotations


def agent_events(states, counts, t, horizon, dt, idx, buy, pref, out_t, out_cn, out_ce):
    """Consume decision epochs until the chunk ends or ``horizon`` is passed.

    ``states`` holds 0 (not purchased), 1 (enabled), 2 (disabled) and is
    updated in place together with ``counts``.  Every state change is written
    to the output buffers.  Returns ``(t, recorded, done)``.
    """
    cn, ce, cd = int(counts[0]), int(counts[1]), int(counts[2])
    buy_l = buy.tolist()
    pref_l = pref.tolist()
    st = states.tolist()
    rec = 0
    done = False
    for step, a in zip(dt.tolist(), idx.tolist()):
        tn = t + step
        if tn > horizon:
            done = True
            break
        t = tn
        s = st[a]
        if s == 0:
            if not buy_l[ce]:
                continue
            st[a] = 1
            cn -= 1
            ce += 1
        elif s == 1:
            if pref_l[ce] >= 0:
                continue
            st[a] = 2
            ce -= 1
            cd += 1
        else:
            if pref_l[ce] <= 0:
                continue
            st[a] = 1
            cd -= 1
            ce += 1
        out_t[rec] = t
        out_cn[rec] = cn
        out_ce[rec] = ce
        rec += 1
    states[:] = st
    counts[0], counts[1], counts[2] = cn, ce, cd
    return t, rec, done

