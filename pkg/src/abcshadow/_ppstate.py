"""Incremental point-process states for the Metropolis-Hastings simulators.

Each state keeps the sufficient statistic of the current pattern updated in
O(local) work per proposal, under a propose/commit/abort protocol:

    delta = state.propose_birth(x, y, mark)   # statistic change, no mutation
    state.commit()                            # apply the pending proposal
    state.abort()                             # drop it instead

``propose_move`` on the candy state mutates eagerly (remove, then re-add on
abort); the protocol hides that. The increments must agree exactly with a
full recomputation through models.sufficient_statistics — the test suite
drives both routes against each other after long random runs.
"""

from __future__ import annotations

import math

import numpy as np

from .core import PointPattern, Window
from .geometry import coverage_counts, pair_count, segment_endpoints, _grid_dims

_PI = math.pi
_HALF_PI = 0.5 * math.pi


def _grow(arr: np.ndarray) -> np.ndarray:
    shape = (2 * arr.shape[0],) + arr.shape[1:]
    out = np.zeros(shape, dtype=arr.dtype)
    out[: arr.shape[0]] = arr
    return out


class StraussState:
    """Point count and close-pair count, updated per proposal."""

    marked = False

    def __init__(self, window: Window, r: float, init: PointPattern):
        self.window = window
        self.r2 = r * r
        self._r = r
        n = len(init)
        cap = max(64, 2 * n)
        self.pos = np.zeros((cap, 2))
        if n:
            self.pos[:n] = init.points
        self.n = n
        self.s = pair_count(init, r) if n else 0
        self._pending = None

    def clone(self) -> "StraussState":
        out = object.__new__(StraussState)
        out.window = self.window
        out.r2 = self.r2
        out._r = self._r
        out.pos = self.pos.copy()
        out.n = self.n
        out.s = self.s
        out._pending = None
        return out

    def statistics(self) -> tuple[float, ...]:
        return (float(self.n), float(self.s))

    def pattern(self) -> PointPattern:
        return PointPattern(self.pos[: self.n].copy(), self.window)

    def location(self, idx: int):
        return float(self.pos[idx, 0]), float(self.pos[idx, 1]), None

    def _near(self, x: float, y: float) -> int:
        p = self.pos[: self.n]
        d2 = (p[:, 0] - x) ** 2 + (p[:, 1] - y) ** 2
        return int(np.count_nonzero(d2 < self.r2))

    def propose_birth(self, x, y, mark=None):
        k = self._near(x, y)
        self._pending = ("b", x, y, k)
        return (1.0, float(k))

    def propose_death(self, idx):
        x, y = self.pos[idx]
        k = self._near(x, y) - 1  # the point itself always lands within r
        self._pending = ("d", idx, k)
        return (-1.0, float(-k))

    def propose_move(self, idx, x, y, mark=None):
        ox, oy = self.pos[idx]
        k_old = self._near(ox, oy) - 1
        k_new = self._near(x, y)
        if (ox - x) ** 2 + (oy - y) ** 2 < self.r2:
            k_new -= 1  # exclude the point being moved
        ds = k_new - k_old
        self._pending = ("m", idx, x, y, ds)
        return (0.0, float(ds))

    def commit(self):
        tag = self._pending[0]
        if tag == "b":
            _, x, y, k = self._pending
            if self.n == self.pos.shape[0]:
                self.pos = _grow(self.pos)
            self.pos[self.n, 0] = x
            self.pos[self.n, 1] = y
            self.n += 1
            self.s += k
        elif tag == "d":
            _, idx, k = self._pending
            self.s -= k
            self.n -= 1
            if idx != self.n:
                self.pos[idx] = self.pos[self.n]
        else:
            _, idx, x, y, ds = self._pending
            self.pos[idx, 0] = x
            self.pos[idx, 1] = y
            self.s += ds
        self._pending = None

    def abort(self):
        self._pending = None


class AreaState:
    """Point count and covered-area statistic on the quadrature grid.

    Maintains per-cell covering-disk counts; a birth/death/move touches only
    the cells inside the affected disk bounding boxes, and the covered area
    stays integer-exact (cell count times cell area), matching
    geometry.union_disks_area recomputed on the same grid bit for bit.
    """

    marked = False

    def __init__(self, window: Window, r: float, resolution: float, init: PointPattern):
        self.window = window
        self.r = r
        self.resolution = resolution
        nx, ny, cw, ch = _grid_dims(window, resolution)
        self.nx, self.ny, self.cw, self.ch = nx, ny, cw, ch
        self.cell_area = cw * ch
        self.inv_disk = 1.0 / (np.pi * r * r)
        n = len(init)
        cap = max(64, 2 * n)
        self.pos = np.zeros((cap, 2))
        if n:
            self.pos[:n] = init.points
        self.n = n
        self.counts = coverage_counts(init.points, window, r, resolution)
        self.covered = int(np.count_nonzero(self.counts))
        self._pending = None

    def clone(self) -> "AreaState":
        out = object.__new__(AreaState)
        out.__dict__.update(self.__dict__)
        out.pos = self.pos.copy()
        out.counts = self.counts.copy()
        out._pending = None
        return out

    def statistics(self) -> tuple[float, ...]:
        return (float(self.n), -self.covered * self.cell_area * self.inv_disk)

    def pattern(self) -> PointPattern:
        return PointPattern(self.pos[: self.n].copy(), self.window)

    def location(self, idx: int):
        return float(self.pos[idx, 0]), float(self.pos[idx, 1]), None

    def _block(self, x: float, y: float):
        """Index box and midpoint-coverage mask of the disk at (x, y)."""
        x0, y0 = self.window.lower
        i0 = max(0, int((x - self.r - x0) / self.cw))
        i1 = min(self.nx - 1, int((x + self.r - x0) / self.cw))
        j0 = max(0, int((y - self.r - y0) / self.ch))
        j1 = min(self.ny - 1, int((y + self.r - y0) / self.ch))
        mx = x0 + (np.arange(i0, i1 + 1) + 0.5) * self.cw
        my = y0 + (np.arange(j0, j1 + 1) + 0.5) * self.ch
        d2 = (mx[:, None] - x) ** 2 + (my[None, :] - y) ** 2
        return i0, i1, j0, j1, d2 <= self.r * self.r

    def propose_birth(self, x, y, mark=None):
        i0, i1, j0, j1, mask = self._block(x, y)
        sub = self.counts[i0 : i1 + 1, j0 : j1 + 1]
        fresh = int(np.count_nonzero(mask & (sub == 0)))
        self._pending = ("b", x, y, i0, i1, j0, j1, mask, fresh)
        return (1.0, -fresh * self.cell_area * self.inv_disk)

    def propose_death(self, idx):
        x, y = self.pos[idx]
        i0, i1, j0, j1, mask = self._block(x, y)
        sub = self.counts[i0 : i1 + 1, j0 : j1 + 1]
        dying = int(np.count_nonzero(mask & (sub == 1)))
        self._pending = ("d", idx, i0, i1, j0, j1, mask, dying)
        return (-1.0, dying * self.cell_area * self.inv_disk)

    def propose_move(self, idx, x, y, mark=None):
        ox, oy = self.pos[idx]
        oi0, oi1, oj0, oj1, omask = self._block(ox, oy)
        ni0, ni1, nj0, nj1, nmask = self._block(x, y)
        i0, i1 = min(oi0, ni0), max(oi1, ni1)
        j0, j1 = min(oj0, nj0), max(oj1, nj1)
        change = np.zeros((i1 - i0 + 1, j1 - j0 + 1), dtype=np.int32)
        change[oi0 - i0 : oi1 - i0 + 1, oj0 - j0 : oj1 - j0 + 1] -= omask
        change[ni0 - i0 : ni1 - i0 + 1, nj0 - j0 : nj1 - j0 + 1] += nmask
        sub = self.counts[i0 : i1 + 1, j0 : j1 + 1]
        new_sub = sub + change
        dcov = int(np.count_nonzero(new_sub)) - int(np.count_nonzero(sub))
        self._pending = ("m", idx, x, y, i0, i1, j0, j1, new_sub, dcov)
        return (0.0, -dcov * self.cell_area * self.inv_disk)

    def commit(self):
        tag = self._pending[0]
        if tag == "b":
            _, x, y, i0, i1, j0, j1, mask, fresh = self._pending
            self.counts[i0 : i1 + 1, j0 : j1 + 1] += mask
            self.covered += fresh
            if self.n == self.pos.shape[0]:
                self.pos = _grow(self.pos)
            self.pos[self.n, 0] = x
            self.pos[self.n, 1] = y
            self.n += 1
        elif tag == "d":
            _, idx, i0, i1, j0, j1, mask, dying = self._pending
            self.counts[i0 : i1 + 1, j0 : j1 + 1] -= mask
            self.covered -= dying
            self.n -= 1
            if idx != self.n:
                self.pos[idx] = self.pos[self.n]
        else:
            _, idx, x, y, i0, i1, j0, j1, new_sub, dcov = self._pending
            self.counts[i0 : i1 + 1, j0 : j1 + 1] = new_sub
            self.covered += dcov
            self.pos[idx, 0] = x
            self.pos[idx, 1] = y
        self._pending = None

    def abort(self):
        self._pending = None


class _AddInfo:
    __slots__ = ("partners", "pend", "my0", "my1", "nrej")

    def __init__(self, partners, pend, my0, my1, nrej):
        self.partners = partners  # indices of segments gaining/losing an edge
        self.pend = pend  # which endpoint of each partner (0 or 1)
        self.my0 = my0  # edges attaching at the subject's endpoint 0
        self.my1 = my1
        self.nrej = nrej  # close non-orthogonal partners


_EMPTY_I = np.zeros(0, dtype=np.intp)
_EMPTY_ADD = _AddInfo(_EMPTY_I, _EMPTY_I, 0, 0, 0)


class CandyState:
    """Segment-interaction counts (doubly, singly, free, rejected pairs).

    Stores per-segment, per-endpoint connection counts; class membership is
    the number of endpoints with at least one connection, so birth/death only
    revisits the affected partners. ``cls`` holds the class counts indexed by
    that degree: cls[0] free, cls[1] singly, cls[2] doubly connected.
    """

    marked = True

    def __init__(self, window: Window, length: float, r_conn: float,
                 tau_conn: float, r_rej: float, tau_rej: float,
                 init: PointPattern):
        self.window = window
        self.length = length
        self.rc2 = r_conn * r_conn
        self.tau_c = tau_conn
        self.rr2 = r_rej * r_rej
        self.ori_cut = _HALF_PI - tau_rej
        n0 = len(init)
        cap = max(64, 2 * n0)
        self.cen = np.zeros((cap, 2))
        self.xi = np.zeros(cap)
        self.e0 = np.zeros((cap, 2))
        self.e1 = np.zeros((cap, 2))
        self.c0 = np.zeros(cap, dtype=np.int32)
        self.c1 = np.zeros(cap, dtype=np.int32)
        self.cls = [0, 0, 0]
        self.nr = 0
        self.n = 0
        self._pending = None
        if n0:
            if init.marks is None:
                raise ValueError("candy state needs orientation marks")
            for i in range(n0):
                info = self._eval_add(init.points[i, 0], init.points[i, 1],
                                      float(init.marks[i]))
                self._apply_add(init.points[i, 0], init.points[i, 1],
                                float(init.marks[i]), info)

    def clone(self) -> "CandyState":
        out = object.__new__(CandyState)
        out.__dict__.update(self.__dict__)
        for name in ("cen", "xi", "e0", "e1", "c0", "c1"):
            setattr(out, name, getattr(self, name).copy())
        out.cls = list(self.cls)
        out._pending = None
        return out

    def statistics(self) -> tuple[float, ...]:
        return (float(self.cls[2]), float(self.cls[1]), float(self.cls[0]),
                float(self.nr))

    def pattern(self) -> PointPattern:
        return PointPattern(self.cen[: self.n].copy(), self.window,
                            self.xi[: self.n].copy())

    def location(self, idx: int):
        return float(self.cen[idx, 0]), float(self.cen[idx, 1]), float(self.xi[idx])

    def _eval_add(self, x: float, y: float, mark: float, skip: int = -1) -> _AddInfo:
        n = self.n
        if n == 0:
            return _EMPTY_ADD
        xi = self.xi[:n]
        t = np.abs(xi - mark) % _PI
        dori = np.minimum(t, _PI - t)
        cen = self.cen[:n]
        cd2 = (cen[:, 0] - x) ** 2 + (cen[:, 1] - y) ** 2
        rej = (cd2 < self.rr2) & (dori < self.ori_cut)
        hx = 0.5 * self.length * math.cos(mark)
        hy = 0.5 * self.length * math.sin(mark)
        f0x, f0y = x - hx, y - hy
        f1x, f1y = x + hx, y + hy
        e0 = self.e0[:n]
        e1 = self.e1[:n]
        rc2 = self.rc2
        w00 = (e0[:, 0] - f0x) ** 2 + (e0[:, 1] - f0y) ** 2 < rc2
        w01 = (e0[:, 0] - f1x) ** 2 + (e0[:, 1] - f1y) ** 2 < rc2
        w10 = (e1[:, 0] - f0x) ** 2 + (e1[:, 1] - f0y) ** 2 < rc2
        w11 = (e1[:, 0] - f1x) ** 2 + (e1[:, 1] - f1y) ** 2 < rc2
        hits = (w00.astype(np.int8) + w01.astype(np.int8)
                + w10.astype(np.int8) + w11.astype(np.int8))
        edge = (hits == 1) & (dori < self.tau_c)
        if skip >= 0:
            edge[skip] = False
            rej[skip] = False
        partners = np.flatnonzero(edge)
        if partners.size:
            # exactly one of the four pair flags holds per edge
            pend = np.where(w00[partners] | w01[partners], 0, 1)
            mine = np.where(w00[partners] | w10[partners], 0, 1)
            my0 = int(np.count_nonzero(mine == 0))
            my1 = partners.size - my0
        else:
            pend = _EMPTY_I
            my0 = my1 = 0
        return _AddInfo(partners, pend, my0, my1, int(np.count_nonzero(rej)))

    def _partner_class_delta(self, info: _AddInfo, sign: int):
        """Class-count changes if each partner's endpoint count moves by sign."""
        d0 = d1 = d2 = 0
        c0 = self.c0
        c1 = self.c1
        for t in range(info.partners.size):
            p = info.partners[t]
            a0 = int(c0[p])
            a1 = int(c1[p])
            old = (a0 > 0) + (a1 > 0)
            if info.pend[t] == 0:
                a0 += sign
            else:
                a1 += sign
            new = (a0 > 0) + (a1 > 0)
            if new != old:
                if old == 0:
                    d0 -= 1
                elif old == 1:
                    d1 -= 1
                else:
                    d2 -= 1
                if new == 0:
                    d0 += 1
                elif new == 1:
                    d1 += 1
                else:
                    d2 += 1
        return d0, d1, d2

    def propose_birth(self, x, y, mark):
        info = self._eval_add(x, y, mark)
        d0, d1, d2 = self._partner_class_delta(info, +1)
        own = (info.my0 > 0) + (info.my1 > 0)
        if own == 0:
            d0 += 1
        elif own == 1:
            d1 += 1
        else:
            d2 += 1
        self._pending = ("b", x, y, mark, info)
        return (float(d2), float(d1), float(d0), float(info.nrej))

    def propose_death(self, idx):
        info = self._eval_add(float(self.cen[idx, 0]), float(self.cen[idx, 1]),
                              float(self.xi[idx]), skip=idx)
        d0, d1, d2 = self._partner_class_delta(info, -1)
        own = (int(self.c0[idx]) > 0) + (int(self.c1[idx]) > 0)
        if own == 0:
            d0 -= 1
        elif own == 1:
            d1 -= 1
        else:
            d2 -= 1
        self._pending = ("d", idx, info)
        return (float(d2), float(d1), float(d0), float(-info.nrej))

    def propose_move(self, idx, x, y, mark):
        # eager removal; abort() re-adds the original segment
        before = (self.cls[2], self.cls[1], self.cls[0], self.nr)
        ox = float(self.cen[idx, 0])
        oy = float(self.cen[idx, 1])
        omark = float(self.xi[idx])
        rem_info = self._eval_add(ox, oy, omark, skip=idx)
        self._apply_remove(idx, rem_info)
        add_info = self._eval_add(x, y, mark)
        d0, d1, d2 = self._partner_class_delta(add_info, +1)
        own = (add_info.my0 > 0) + (add_info.my1 > 0)
        if own == 0:
            d0 += 1
        elif own == 1:
            d1 += 1
        else:
            d2 += 1
        after = (self.cls[2] + d2, self.cls[1] + d1, self.cls[0] + d0,
                 self.nr + add_info.nrej)
        self._pending = ("m", x, y, mark, add_info, ox, oy, omark)
        return tuple(float(a - b) for a, b in zip(after, before))

    def commit(self):
        tag = self._pending[0]
        if tag == "b":
            _, x, y, mark, info = self._pending
            self._apply_add(x, y, mark, info)
        elif tag == "d":
            _, idx, info = self._pending
            self._apply_remove(idx, info)
        else:
            _, x, y, mark, info, _, _, _ = self._pending
            self._apply_add(x, y, mark, info)
        self._pending = None

    def abort(self):
        if self._pending is not None and self._pending[0] == "m":
            _, _, _, _, _, ox, oy, omark = self._pending
            info = self._eval_add(ox, oy, omark)
            self._apply_add(ox, oy, omark, info)
        self._pending = None

    def _shift_class(self, old: int, new: int):
        if new != old:
            self.cls[old] -= 1
            self.cls[new] += 1

    def _apply_add(self, x, y, mark, info: _AddInfo):
        c0 = self.c0
        c1 = self.c1
        for t in range(info.partners.size):
            p = info.partners[t]
            # plain ints: numpy bools would add as logical or
            old = (int(c0[p]) > 0) + (int(c1[p]) > 0)
            if info.pend[t] == 0:
                c0[p] += 1
            else:
                c1[p] += 1
            self._shift_class(old, (int(c0[p]) > 0) + (int(c1[p]) > 0))
        n = self.n
        if n == self.cen.shape[0]:
            self.cen = _grow(self.cen)
            self.xi = _grow(self.xi)
            self.e0 = _grow(self.e0)
            self.e1 = _grow(self.e1)
            self.c0 = _grow(self.c0)
            self.c1 = _grow(self.c1)
            c0 = self.c0
            c1 = self.c1
        self.cen[n, 0] = x
        self.cen[n, 1] = y
        self.xi[n] = mark
        hx = 0.5 * self.length * math.cos(mark)
        hy = 0.5 * self.length * math.sin(mark)
        self.e0[n, 0] = x - hx
        self.e0[n, 1] = y - hy
        self.e1[n, 0] = x + hx
        self.e1[n, 1] = y + hy
        c0[n] = info.my0
        c1[n] = info.my1
        self.cls[(info.my0 > 0) + (info.my1 > 0)] += 1
        self.nr += info.nrej
        self.n = n + 1

    def _apply_remove(self, idx: int, info: _AddInfo):
        c0 = self.c0
        c1 = self.c1
        for t in range(info.partners.size):
            p = info.partners[t]
            old = (int(c0[p]) > 0) + (int(c1[p]) > 0)
            if info.pend[t] == 0:
                c0[p] -= 1
            else:
                c1[p] -= 1
            self._shift_class(old, (int(c0[p]) > 0) + (int(c1[p]) > 0))
        self.cls[(int(c0[idx]) > 0) + (int(c1[idx]) > 0)] -= 1
        self.nr -= info.nrej
        last = self.n - 1
        if idx != last:
            self.cen[idx] = self.cen[last]
            self.xi[idx] = self.xi[last]
            self.e0[idx] = self.e0[last]
            self.e1[idx] = self.e1[last]
            c0[idx] = c0[last]
            c1[idx] = c1[last]
        self.n = last
