"""Successive-cancellation plumbing: intermediate LLR recursions and partial-sum updates.

The factor graph has n+1 stages; stage n holds the N channel LLRs and stage 0
produces the per-bit decision LLR.  Only one block per stage is ever live, so
LLRs are stored compactly: stage s occupies slots [2^s - 1, 2^{s+1} - 1) of a
(2N - 1)-slot buffer.  Partial sums keep the full (n+1) x N layout so that the
stage-n row equals the polar transform of the committed bits once all N bits
are in.

``ScBank`` holds one scratch row per decoder path and applies every update to
all rows at once; ``ScScratch`` is the single-path view of a one-row bank.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "ContractViolationError",
    "f_minsum",
    "f_exact",
    "g_combine",
    "ScBank",
    "ScScratch",
]

# tanh saturates to 1.0 in float64 near |x| ~ 19, so products of tanh(llr/2)
# stay strictly inside (-1, 1) for |llr| < 30; the clip only bites beyond that.
_ATANH_LIMIT = 1.0 - 1e-15

COMBINING_RULES = ("min-sum", "exact")


class ContractViolationError(RuntimeError):
    """An operation was invoked outside its allowed call sequence."""


def f_minsum(a, b):
    """Check-node combine, min-sum rule: sign(a) sign(b) min(|a|, |b|)."""
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def f_exact(a, b):
    """Check-node combine, exact rule 2 atanh(tanh(a/2) tanh(b/2)), clipped for safety."""
    t = np.tanh(0.5 * np.asarray(a, dtype=float)) * np.tanh(0.5 * np.asarray(b, dtype=float))
    return 2.0 * np.arctanh(np.clip(t, -_ATANH_LIMIT, _ATANH_LIMIT))


def g_combine(a, b, c):
    """Variable-node combine: b + (1 - 2c) a for committed partial sum c."""
    return b + (1.0 - 2.0 * np.asarray(c, dtype=float)) * a


def _combiner(name):
    if name == "min-sum":
        return f_minsum
    if name == "exact":
        return f_exact
    raise ValueError(f"combining rule must be one of {COMBINING_RULES}, got {name!r}")


class ScBank:
    """Batched SC scratch: one row of intermediate LLRs and partial sums per path.

    Updates follow the standard in-order schedule: ``update_llrs(t)`` then
    ``update_partial_sums(t, u)`` for t = 0 .. N-1.  Rows may be duplicated
    (path splitting) or gathered (pruning) between the two calls.
    """

    def __init__(self, channel_llrs, combining: str = "min-sum", paths: int = 1):
        llrs = np.asarray(channel_llrs, dtype=float)
        N = llrs.size
        if N < 1 or N & (N - 1):
            raise ValueError(f"channel LLR length must be a power of two, got {N}")
        self.N = N
        self.n = N.bit_length() - 1
        self.combining = combining
        self._f = _combiner(combining)
        self.llr = np.zeros((paths, 2 * N - 1), dtype=float)
        self.llr[:, N - 1 :] = llrs
        self.beta = np.zeros((paths, self.n + 1, N), dtype=np.int8)
        # _t: next undecided bit index; _pending: update_llrs done, commit outstanding
        self._t = 0
        self._pending = False

    @property
    def n_paths(self) -> int:
        return self.llr.shape[0]

    def update_llrs(self, t: int) -> np.ndarray:
        """Recompute the factor-graph nodes needed for bit t; return decision LLRs (one per path).

        The returned vector is a view, valid until the next bank mutation of
        the LLR buffer (i.e. until the next ``update_llrs``).
        """
        if self._pending or t != self._t:
            raise ContractViolationError(
                f"update_llrs({t}) out of order: next expected bit is {self._t}"
                + (" (pending commit)" if self._pending else "")
            )
        llr = self.llr
        f = self._f
        if t == 0:
            top = self.n
        else:
            top = ((t & -t)).bit_length() - 1  # lowest set bit: g-update stage
            w = 1 << top
            o, op = w - 1, 2 * w - 1
            left = (t >> (top + 1)) << (top + 1)
            a = llr[:, op : op + w]
            llr[:, o : o + w] = llr[:, op + w : op + 2 * w] + (
                1.0 - 2.0 * self.beta[:, top, left : left + w]
            ) * a
        for s in range(top - 1, -1, -1):
            w = 1 << s
            o, op = w - 1, 2 * w - 1
            llr[:, o : o + w] = f(llr[:, op : op + w], llr[:, op + w : op + 2 * w])
        self._pending = True
        return llr[:, 0]

    def update_partial_sums(self, t: int, u_hat) -> None:
        """Commit the decided bits for index t (one per path) into the partial-sum tree."""
        if not self._pending or t != self._t:
            if t < self._t:
                raise ContractViolationError(f"bit {t} already committed")
            raise ContractViolationError(
                f"update_partial_sums({t}) requires update_llrs({self._t}) first"
            )
        beta = self.beta
        beta[:, 0, t] = np.asarray(u_hat, dtype=np.int8)
        s = 0
        while s < self.n and (t >> s) & 1:
            half = 1 << s
            o = (t >> (s + 1)) << (s + 1)
            beta[:, s + 1, o : o + half] = (
                beta[:, s, o : o + half] ^ beta[:, s, o + half : o + 2 * half]
            )
            beta[:, s + 1, o + half : o + 2 * half] = beta[:, s, o + half : o + 2 * half]
            s += 1
        self._pending = False
        self._t = t + 1

    def duplicate(self) -> None:
        """Append a copy of every row (copies land below the originals, same order)."""
        self.llr = np.concatenate([self.llr, self.llr], axis=0)
        self.beta = np.concatenate([self.beta, self.beta], axis=0)

    def take(self, rows) -> None:
        """Keep only the given rows, in the given order."""
        self.llr = self.llr[rows]
        self.beta = self.beta[rows]

    def stage_n_sums(self) -> np.ndarray:
        """Stage-n partial sums; equals the polar transform of the committed bits after N commits."""
        return self.beta[:, self.n, :].copy()


class ScScratch:
    """Single-path SC scratch: the one-row view of ``ScBank``.

    Exposes the same in-order update contract with scalar decisions, plus the
    raw buffers for inspection.
    """

    def __init__(self, channel_llrs, combining: str = "min-sum"):
        self._bank = ScBank(channel_llrs, combining=combining, paths=1)

    @classmethod
    def _from_bank_row(cls, bank: ScBank, row: int) -> "ScScratch":
        out = cls.__new__(cls)
        sub = ScBank.__new__(ScBank)
        sub.N, sub.n = bank.N, bank.n
        sub.combining, sub._f = bank.combining, bank._f
        sub.llr = bank.llr[row : row + 1].copy()
        sub.beta = bank.beta[row : row + 1].copy()
        sub._t, sub._pending = bank._t, bank._pending
        out._bank = sub
        return out

    @property
    def N(self) -> int:
        return self._bank.N

    @property
    def llr(self) -> np.ndarray:
        return self._bank.llr[0]

    @property
    def beta(self) -> np.ndarray:
        return self._bank.beta[0]

    def update_llrs(self, t: int) -> float:
        return float(self._bank.update_llrs(t)[0])

    def update_partial_sums(self, t: int, u_hat: int) -> "ScScratch":
        self._bank.update_partial_sums(t, np.asarray([u_hat], dtype=np.int8))
        return self

    def stage_n_sums(self) -> np.ndarray:
        return self._bank.stage_n_sums()[0]
