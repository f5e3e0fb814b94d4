"""Unified trellis decoder: SC, SC-list, Viterbi and list-Viterbi from one path engine.

Every decoder in the family runs the same loop: at a frozen index each path
extends with v = 0; at an information index each path splits into a v = 0 and
a v = 1 child; when the survivor budget overflows, paths are pruned either
globally (list decoding) or per shift-register state (list Viterbi).  The
special cases fall out of the configuration:

    sorting=global, list_size=1   -> successive cancellation
    sorting=global, list_size=L   -> SC list decoding
    sorting=local,  list_size=1   -> Viterbi (one survivor per state)
    sorting=local,  list_size=L   -> list Viterbi (L survivors per state)

All per-path state lives in parallel arrays (one row per path) so that every
operation is applied to the whole survivor set in a handful of vector ops.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pac_core import PacCode, parity_table
from .sc_engine import COMBINING_RULES, ContractViolationError, ScBank, ScScratch

__all__ = [
    "DecoderConfig",
    "Path",
    "PathSet",
    "DecodeResult",
    "hard_decision",
    "branch_metric",
    "extend_frozen",
    "extend_info",
    "prune",
    "select_winner",
    "decode",
]

SORTING_MODES = ("local", "global")
METRIC_MODES = ("exact", "approximate")

_DECODER_NAMES = {
    "sc": ("global", 1),
    "scl": ("global", None),
    "va": ("local", 1),
    "lva": ("local", None),
}


@dataclass(frozen=True)
class DecoderConfig:
    """Decoder configuration: sorting strategy, list size, metric and combining rules.

    ``list_size`` is the survivor budget per state under local sorting and the
    total budget under global sorting, so the local total is list_size * 2^m.
    """

    sorting: str = "global"
    list_size: int = 1
    metric_mode: str = "approximate"
    combining_rule: str = "min-sum"

    def __post_init__(self):
        if self.sorting not in SORTING_MODES:
            raise ValueError(f"sorting must be one of {SORTING_MODES}, got {self.sorting!r}")
        if not isinstance(self.list_size, (int, np.integer)) or self.list_size < 1:
            raise ValueError(f"list_size must be a positive integer, got {self.list_size!r}")
        if self.metric_mode not in METRIC_MODES:
            raise ValueError(f"metric_mode must be one of {METRIC_MODES}, got {self.metric_mode!r}")
        if self.combining_rule not in COMBINING_RULES:
            raise ValueError(
                f"combining_rule must be one of {COMBINING_RULES}, got {self.combining_rule!r}"
            )

    @classmethod
    def from_name(cls, name: str, list_size: int | None = None, **kwargs) -> "DecoderConfig":
        """Build a config from a decoder name: sc, scl, va or lva."""
        try:
            sorting, implied = _DECODER_NAMES[name]
        except KeyError:
            raise ValueError(f"decoder name must be one of {sorted(_DECODER_NAMES)}, got {name!r}")
        if implied is None and list_size is None:
            raise ValueError(f"decoder {name!r} needs an explicit list size")
        return cls(sorting=sorting, list_size=implied if implied is not None else list_size, **kwargs)

    @property
    def name(self) -> str:
        """Conventional name of this configuration."""
        if self.sorting == "global":
            return "sc" if self.list_size == 1 else "scl"
        return "va" if self.list_size == 1 else "lva"

    def budget(self, m: int) -> int:
        """Total survivor budget for a code with memory m."""
        return self.list_size if self.sorting == "global" else self.list_size << m


def hard_decision(llr):
    """Hard decision on a decision LLR: 0 for positive, 1 otherwise (zero maps to 1)."""
    out = np.where(np.asarray(llr, dtype=float) > 0, 0, 1).astype(np.int8)
    return int(out) if np.ndim(llr) == 0 else out


def branch_metric(llr, u_hat, mode: str = "approximate"):
    """Per-bit penalty for deciding u_hat against decision LLR(s).

    Exact mode evaluates log(1 + exp(-(1 - 2u) llr)); approximate mode charges
    zero when u_hat matches the hard decision and |llr| otherwise.
    """
    llr = np.asarray(llr, dtype=float)
    u = np.asarray(u_hat)
    if mode == "approximate":
        out = np.where(u == (llr <= 0), 0.0, np.abs(llr))
    elif mode == "exact":
        out = np.logaddexp(0.0, -(1.0 - 2.0 * u) * llr)
    else:
        raise ValueError(f"metric mode must be one of {METRIC_MODES}, got {mode!r}")
    return float(out) if out.ndim == 0 else out


@dataclass
class Path:
    """Snapshot of a single decoder hypothesis."""

    conv_state: tuple
    metric: float
    v_hist: np.ndarray
    u_hist: np.ndarray
    scratch: ScScratch
    id: int


class PathSet:
    """The live decoder hypotheses, stored as parallel arrays (one row per path)."""

    def __init__(self, channel_llrs, code: PacCode, config: DecoderConfig):
        llrs = np.asarray(channel_llrs, dtype=float)
        if llrs.size != code.N:
            raise ValueError(f"expected {code.N} channel LLRs, got {llrs.size}")
        self.code = code
        self.config = config
        self.bank = ScBank(llrs, combining=config.combining_rule, paths=1)
        self.states = np.zeros(1, dtype=np.int64)
        self.metrics = np.zeros(1, dtype=float)
        self.ids = np.zeros(1, dtype=np.int64)
        self.v_hist = np.zeros((1, code.N), dtype=np.int8)
        self.u_hist = np.zeros((1, code.N), dtype=np.int8)
        self.next_id = 1
        self._ptab = parity_table(code.g)
        self._m = code.m
        self._approx = config.metric_mode == "approximate"

    @property
    def size(self) -> int:
        return self.metrics.size

    def path(self, i: int) -> Path:
        """Materialize path i as a standalone snapshot (scratch included)."""
        m = self.code.m
        s = int(self.states[i])
        bits = tuple((s >> (m - 1 - j)) & 1 for j in range(m))
        return Path(
            conv_state=bits,
            metric=float(self.metrics[i]),
            v_hist=self.v_hist[i].copy(),
            u_hist=self.u_hist[i].copy(),
            scratch=ScScratch._from_bank_row(self.bank, i),
            id=int(self.ids[i]),
        )

    def _gather(self, rows) -> None:
        self.bank.take(rows)
        self.states = self.states[rows]
        self.metrics = self.metrics[rows]
        self.ids = self.ids[rows]
        self.v_hist = self.v_hist[rows]
        self.u_hist = self.u_hist[rows]


def extend_frozen(paths: PathSet, t: int) -> PathSet:
    """Extend every path with v_t = 0: encode, charge the branch penalty, commit."""
    lam = paths.bank.update_llrs(t)
    u = paths._ptab[paths.states]
    if paths._approx:
        pen = np.where(u == (lam <= 0), 0.0, np.abs(lam))
    else:
        pen = np.logaddexp(0.0, -(1.0 - 2.0 * u) * lam)
    paths.metrics += pen
    if paths._m:
        paths.states >>= 1
    paths.v_hist[:, t] = 0
    paths.u_hist[:, t] = u
    paths.bank.update_partial_sums(t, u)
    return paths


def extend_info(paths: PathSet, t: int) -> PathSet:
    """Split every path into a v_t = 0 original and a v_t = 1 copy (count doubles).

    Both children encode from the parent's pre-extension register state; the
    copies are appended below the originals in parent order and receive fresh
    creation ids.  Overflow of the survivor budget is handled by ``prune``.
    """
    lam = paths.bank.update_llrs(t)
    m = paths._m
    P = paths.metrics.size
    u0 = paths._ptab[paths.states]
    u1 = u0 ^ 1
    if paths._approx:
        # the two children differ in u, so exactly one of them pays |lam|
        mag = np.abs(lam)
        pen0 = np.where(u0 == (lam <= 0), 0.0, mag)
        pen1 = mag - pen0
    else:
        z = (1.0 - 2.0 * u0) * lam
        pen0 = np.logaddexp(0.0, -z)
        pen1 = np.logaddexp(0.0, z)
    paths.bank.duplicate()
    paths.metrics = np.concatenate([paths.metrics + pen0, paths.metrics + pen1])
    paths.ids = np.concatenate([paths.ids, np.arange(P, dtype=np.int64) + paths.next_id])
    paths.next_id += P
    if m:
        s0 = paths.states >> 1
        paths.states = np.concatenate([s0, s0 | (1 << (m - 1))])
    else:
        paths.states = np.concatenate([paths.states, paths.states])
    paths.v_hist = np.concatenate([paths.v_hist, paths.v_hist], axis=0)
    paths.v_hist[:P, t] = 0
    paths.v_hist[P:, t] = 1
    paths.u_hist = np.concatenate([paths.u_hist, paths.u_hist], axis=0)
    paths.u_hist[:P, t] = u0
    paths.u_hist[P:, t] = u1
    paths.bank.update_partial_sums(t, np.concatenate([u0, u1]))
    return paths


def prune(paths: PathSet, config: DecoderConfig | None = None, observer=None) -> PathSet:
    """Drop paths over the survivor budget; a no-op while the budget is not exceeded.

    Global sorting keeps the list_size smallest-metric paths overall; local
    sorting keeps the list_size smallest per register state.  Ties break on
    creation id, and survivors are left ordered by (metric, id).
    """
    cfg = config if config is not None else paths.config
    cap = cfg.budget(paths.code.m)
    if paths.size <= cap:
        return paths
    if cfg.sorting == "global":
        order = np.lexsort((paths.ids, paths.metrics))
        keep = order[: cfg.list_size]
    else:
        order = np.lexsort((paths.ids, paths.metrics, paths.states))
        st = paths.states[order]
        first = np.empty(st.size, dtype=bool)
        first[0] = True
        first[1:] = st[1:] != st[:-1]
        starts = np.flatnonzero(first)
        group = np.cumsum(first) - 1
        rank = np.arange(st.size) - starts[group]
        kept = order[rank < cfg.list_size]
        keep = kept[np.lexsort((paths.ids[kept], paths.metrics[kept]))]
    if observer is not None:
        observer(paths.states, paths.metrics, paths.ids, keep)
    paths._gather(keep)
    return paths


def select_winner(paths: PathSet) -> Path:
    """The smallest-metric path (smallest creation id on ties)."""
    if paths.size == 0:
        raise ContractViolationError("no surviving paths to select from")
    row = int(np.lexsort((paths.ids, paths.metrics))[0])
    return paths.path(row)


@dataclass
class DecodeResult:
    """Winner of a decode plus the final survivor set for diagnostics."""

    d_hat: np.ndarray
    metric: float
    v_hat: np.ndarray
    u_hat: np.ndarray
    survivor_metrics: np.ndarray = field(repr=False, default=None)
    survivor_ids: np.ndarray = field(repr=False, default=None)
    survivor_v: np.ndarray = field(repr=False, default=None)


def decode(channel_llrs, code: PacCode, config: DecoderConfig,
           step_hook=None, prune_observer=None) -> DecodeResult:
    """Run the configured trellis decoder over one block of channel LLRs.

    Decoding starts from a single zero-state, zero-metric path and walks
    t = 0 .. N-1, extending at every index and pruning after information
    indices.  Returns the winner's message bits (its v history restricted to
    the information set) together with its final metric.

    ``step_hook(t, paths)`` is called after each bit; ``prune_observer``
    receives (t, states, metrics, ids, kept_rows) at every pruning event.
    """
    paths = PathSet(channel_llrs, code, config)
    frozen = np.ones(code.N, dtype=bool)
    frozen[list(code.A)] = False
    observer = None
    for t in range(code.N):
        if frozen[t]:
            extend_frozen(paths, t)
        else:
            extend_info(paths, t)
            if prune_observer is not None:
                observer = lambda s, mt, ii, keep, _t=t: prune_observer(_t, s, mt, ii, keep)
            prune(paths, observer=observer)
        if step_hook is not None:
            step_hook(t, paths)
    order = np.lexsort((paths.ids, paths.metrics))
    win = int(order[0])
    info = np.fromiter(code.A, dtype=np.int64, count=code.K)
    return DecodeResult(
        d_hat=paths.v_hist[win, info].copy(),
        metric=float(paths.metrics[win]),
        v_hat=paths.v_hist[win].copy(),
        u_hat=paths.u_hist[win].copy(),
        survivor_metrics=paths.metrics[order].copy(),
        survivor_ids=paths.ids[order].copy(),
        survivor_v=paths.v_hist[order].copy(),
    )
