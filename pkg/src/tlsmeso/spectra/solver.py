"""Generic branch tracing for characteristic equations.

Per q the characteristic function is evaluated on batched local windows
around per-branch predictions (falling back to full-range scans), sign
changes are bracketed, and all brackets are polished together by
vectorized bisection.  Curves are tracked across q by nearest-
continuation with ordering repair on the periodic full rescans.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq


class BranchTraceError(RuntimeError):
    pass


def _scan_roots(f, grid: np.ndarray, polish: bool = True,
                noise_floor: float = 0.0) -> list[float]:
    """Roots of f on a 1-D grid by sign change + bisection.

    Sign changes where both endpoints are below `noise_floor` in magnitude
    are discarded: for column-normalized determinants those are rounding
    noise in near-degenerate regions, not roots.
    """
    vals = f(grid)
    sign = np.signbit(vals)
    idx = np.nonzero(sign[:-1] != sign[1:])[0]
    if noise_floor > 0.0 and len(idx):
        amp = np.fmax(np.abs(vals[idx]), np.abs(vals[idx + 1]))
        idx = idx[amp > noise_floor]
    if len(idx) == 0:
        return []
    a = grid[idx].astype(float)
    b = grid[idx + 1].astype(float)
    if not polish:
        return list(0.5 * (a + b))
    return sorted(_bisect_batch(f, a, b))


def _bisect_batch(f, a: np.ndarray, b: np.ndarray, iters: int = 46) -> np.ndarray:
    """Vectorized bisection; f is sign-changing on each [a_i, b_i]."""
    fa = f(a)
    sa = np.signbit(fa)
    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = f(m)
        left = np.signbit(fm) == sa
        a = np.where(left, m, a)
        b = np.where(left, b, m)
        if np.all((b - a) <= 1e-13 * np.maximum(np.abs(b), 1e-300)):
            break
    return 0.5 * (a + b)


def trace_branches(chareq, q_grid: np.ndarray, Omega_cap: float, *,
                   omega_points: int = 1000, omega_lo: float | None = None,
                   scan_lo=None, rescan_every: int = 12, label: str = "",
                   noise_floor: float = 0.0) -> list[dict]:
    """Trace all root curves Omega_m(q) of chareq(q, Omega_array) below Omega_cap.

    `scan_lo(q)` bounds the full-scan window from below (physical branches
    only exist above it; far below it normalized determinants underflow to
    sign noise and would spawn phantom roots).  Returns a list of
    {'q': array, 'Omega': array} dicts sorted by their starting frequency.
    """
    if omega_lo is None:
        omega_lo = Omega_cap * 1e-8

    def full_scan(q):
        lo = omega_lo if scan_lo is None else max(omega_lo, min(scan_lo(q), 0.3 * Omega_cap))
        grid = np.geomspace(lo, Omega_cap, omega_points)
        return _scan_roots(lambda Om: chareq(q, Om), grid, noise_floor=noise_floor)

    q0 = q_grid[0]
    roots0 = full_scan(q0)
    curves = [{"q": [float(q0)], "Omega": [r], "live": True} for r in roots0]

    n_local = 15
    for step, q in enumerate(q_grid[1:], start=1):
        f = lambda Om: chareq(q, Om)
        live = [c for c in curves if c["live"]]
        if not live:
            # nothing tracked yet (or everything exited through the cap):
            # keep scanning -- curves whose roots were below the noise
            # floor at smaller q become resolvable as q grows
            for r in full_scan(q):
                curves.append({"q": [float(q)], "Omega": [r], "live": True})
            continue
        preds, widths = [], []
        for c in live:
            if len(c["Omega"]) >= 2:
                dq = c["q"][-1] - c["q"][-2]
                slope = (c["Omega"][-1] - c["Omega"][-2]) / dq if dq > 0 else 0.0
                dlast = abs(c["Omega"][-1] - c["Omega"][-2])
            else:
                slope, dlast = 0.0, 0.0
            pred = c["Omega"][-1] + slope * (q - c["q"][-1])
            preds.append(pred)
            widths.append(max(3 * dlast, 0.004 * max(pred, 10 * omega_lo)))

        if step % rescan_every == 0:
            roots = full_scan(q)
            _assign_full(curves, live, preds, roots, q, Omega_cap)
            continue

        # batched local windows
        brackets = {}
        todo = [i for i, p in enumerate(preds) if omega_lo * 0.2 < p <= Omega_cap]
        for c, p in zip(live, preds):
            if p > Omega_cap or p <= omega_lo * 0.2:
                c["live"] = False
        for attempt in range(3):
            if not todo:
                break
            grids = []
            for i in todo:
                a = max(preds[i] - widths[i], omega_lo * 0.1)
                b = max(preds[i] + widths[i], a * (1 + 1e-9))
                grids.append(np.linspace(a, b, n_local))
            vals = f(np.concatenate(grids))
            still = []
            for slot, i in enumerate(todo):
                g = grids[slot]
                v = vals[slot * n_local:(slot + 1) * n_local]
                sign = np.signbit(v)
                ch = np.nonzero(sign[:-1] != sign[1:])[0]
                if noise_floor > 0.0 and len(ch):
                    amp = np.fmax(np.abs(v[ch]), np.abs(v[ch + 1]))
                    ch = ch[amp > noise_floor]
                if len(ch):
                    # sign change nearest the prediction
                    j = min(ch, key=lambda k: abs(0.5 * (g[k] + g[k + 1]) - preds[i]))
                    brackets[i] = (g[j], g[j + 1])
                else:
                    widths[i] *= 5.0
                    still.append(i)
            todo = still
        if todo:
            # local search failed somewhere: full rescan with matching
            roots = full_scan(q)
            _assign_full(curves, live, preds, roots, q, Omega_cap)
            continue
        if brackets:
            items = sorted(brackets.items())
            a = np.array([ab[0] for _, ab in items])
            b = np.array([ab[1] for _, ab in items])
            roots = _bisect_batch(f, a, b)
            for (i, _), r in zip(items, roots):
                live[i]["q"].append(float(q))
                live[i]["Omega"].append(float(r))

    out = []
    for c in curves:
        if len(c["q"]) >= 4:
            out.append({"q": np.array(c["q"]), "Omega": np.array(c["Omega"])})
    out.sort(key=lambda c: c["Omega"][0])
    return out


def refine_curves(chareq, curves: list[dict], noise_floor: float = 0.0,
                  insert_tol: float = 0.0) -> tuple[list[dict], int]:
    """Insert polished root samples at geometric q-midpoints of each curve.

    Subdivides the interpolation mesh so monotone-cubic reconstruction
    meets tight held-out tolerances; with `insert_tol` > 0 only midpoints
    whose interpolation error exceeds it are kept (adaptive rounds).
    Requires chareq to broadcast element-wise over paired (q, Omega)
    arrays.  Midpoints that fail to bracket are skipped.  Returns the
    refined curves and the number of inserted samples.
    """
    from scipy.interpolate import PchipInterpolator

    out = []
    n_inserted = 0
    for c in curves:
        q, Om = np.asarray(c["q"]), np.asarray(c["Omega"])
        if q.size < 6:
            out.append(c)
            continue
        qm = np.sqrt(q[:-1] * q[1:])
        pred = PchipInterpolator(q, Om)(qm)
        dOm = np.abs(np.diff(Om))
        w = 0.35 * dOm + 1e-12 * pred
        n_loc = 9
        keep = np.zeros(qm.size, dtype=bool)
        a = np.empty_like(qm)
        b = np.empty_like(qm)
        for _ in range(3):
            miss = np.nonzero(~keep)[0]
            if miss.size == 0:
                break
            # scan a small window per midpoint; endpoint-only sign checks
            # would miss root pairs when a neighboring branch crosses the
            # window
            lo = np.maximum(pred[miss] - w[miss], 0.0)
            hi = pred[miss] + w[miss]
            grids = lo[:, None] + (hi - lo)[:, None] * np.linspace(0, 1, n_loc)
            vals = chareq(np.repeat(qm[miss], n_loc),
                          grids.ravel()).reshape(-1, n_loc)
            sign = np.signbit(vals)
            ch = sign[:, :-1] != sign[:, 1:]
            amp = np.fmax(np.abs(vals[:, :-1]), np.abs(vals[:, 1:]))
            ch &= amp > noise_floor
            mid = 0.5 * (grids[:, :-1] + grids[:, 1:])
            dist = np.where(ch, np.abs(mid - pred[miss][:, None]), np.inf)
            j = np.argmin(dist, axis=1)
            found = np.isfinite(dist[np.arange(miss.size), j])
            sel = miss[found]
            a[sel] = grids[found, j[found]]
            b[sel] = grids[found, j[found] + 1]
            keep[sel] = True
            w *= 3.0
        if not np.any(keep):
            out.append(c)
            continue
        qs, as_, bs = qm[keep], a[keep], b[keep]
        roots = _bisect_batch(lambda Om: chareq(qs, Om), as_, bs)
        # drop refinements that jumped to a neighboring branch; the
        # relative floor keeps flat extremum regions (tiny local dOm)
        # refinable -- adjacent branches are far away on this scale
        good = np.abs(roots - pred[keep]) < np.maximum(0.45 * dOm[keep], 1e-3 * roots)
        if insert_tol > 0.0:
            good &= np.abs(roots - pred[keep]) > insert_tol * roots
        q_new = np.concatenate([q, qs[good]])
        Om_new = np.concatenate([Om, roots[good]])
        n_inserted += int(np.count_nonzero(good))
        order = np.argsort(q_new)
        out.append({"q": q_new[order], "Omega": Om_new[order]})
    return out, n_inserted


def _assign_full(curves, live, preds, roots, q, Omega_cap):
    """Match full-scan roots to live curves by nearest prediction."""
    unused = list(roots)
    order = sorted(range(len(live)), key=lambda i: preds[i])
    for i in order:
        c, pred = live[i], preds[i]
        if not unused:
            if pred > 0.97 * Omega_cap:
                c["live"] = False
            continue
        r = min(unused, key=lambda x: abs(x - pred))
        tol = max(0.12 * max(pred, r), 1e-6 * Omega_cap)
        if abs(r - pred) < tol:
            unused.remove(r)
            c["q"].append(float(q))
            c["Omega"].append(float(r))
        elif pred > 0.97 * Omega_cap:
            c["live"] = False
    for r in unused:
        # not seen before (entered through the cap or missed at q0); skip
        # anything shadowing an already-tracked curve
        near_tracked = any(abs(r - p) < 0.05 * max(r, p) for p in preds)
        if not near_tracked:
            curves.append({"q": [float(q)], "Omega": [float(r)], "live": True})
