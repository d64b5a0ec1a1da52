"""Budgeted edge-query oracle: the only gateway from a strategy or detector to
an instance.

The budget counts *unique unordered pairs*; answers are deterministic, so a
repeated pair returns the cached answer for free.  A strict mode charging every
call exists for sensitivity checks.  The count of queries landing inside the
planted set is instrumentation for the harness and never reaches detectors.
"""

from __future__ import annotations

import threading

import numpy as np

from .errors import BudgetExhaustedError, NotApplicableError, SelfLoopError
from .model import H1, Instance, edge_values

LOG_CSV_HEADER = "trial_id,step,i,j,answer,cumulative_unique"


class BudgetedOracle:
    def __init__(self, instance: Instance, budget: int, strict: bool = False):
        if budget < 0:
            raise ValueError("budget must be nonnegative")
        self.instance = instance
        self.budget = int(budget)
        self.strict = strict
        self._answers: dict[int, float] = {}
        self._planted_hits = 0
        self._calls = 0
        self._log_i: list[np.ndarray] = []
        self._log_j: list[np.ndarray] = []
        self._log_ans: list[np.ndarray] = []
        self._log_cum: list[np.ndarray] = []
        self._lock = threading.Lock()

    @property
    def used(self) -> int:
        """Unique unordered pairs consumed so far."""
        return len(self._answers)

    @property
    def remaining(self) -> int:
        charged = self._calls if self.strict else self.used
        return self.budget - charged

    def _keys(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        return lo * np.int64(self.instance.params.n) + hi

    def query_many(self, i, j) -> np.ndarray:
        """Answer a batch of pairs; atomic w.r.t. budget (all admitted or none)."""
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        if i.size == 0:
            return np.empty(0)
        with self._lock:
            lo = np.minimum(i, j)
            hi = np.maximum(i, j)
            if np.any(lo == hi):
                raise SelfLoopError("self-loop query")
            keys = self._keys(lo, hi)
            uniq, first_idx = np.unique(keys, return_index=True)
            if self._answers:
                fresh = np.fromiter(
                    (k not in self._answers for k in uniq.tolist()),
                    dtype=bool, count=uniq.size,
                )
                new_keys = uniq[fresh]
                new_idx = first_idx[fresh]
            else:
                new_keys, new_idx = uniq, first_idx
            charge = i.size if self.strict else new_keys.size
            if self.remaining < charge:
                raise BudgetExhaustedError(
                    f"batch needs {charge} of {self.remaining} remaining queries"
                )
            self._calls += i.size
            answers = edge_values(self.instance, lo, hi)
            # overwrite with cached answers for already-seen pairs (identical by
            # determinism, but keeps the cache authoritative)
            if self._answers and new_keys.size < uniq.size:
                for pos, key in enumerate(keys.tolist()):
                    cached = self._answers.get(key)
                    if cached is not None:
                        answers[pos] = cached
            new_ans = answers[new_idx]
            self._answers.update(zip(new_keys.tolist(), new_ans.tolist()))
            if self.instance.hypothesis == H1:
                mask = self.instance._planted_mask
                nlo, nhi = lo[new_idx], hi[new_idx]
                self._planted_hits += int(np.count_nonzero(mask[nlo] & mask[nhi]))
            seen_before = np.isin(keys, new_keys, invert=True)
            # cumulative unique count after each logged step
            is_first = np.zeros(keys.size, dtype=bool)
            is_first[new_idx] = True
            is_first &= ~seen_before
            base = self.used - new_keys.size
            self._log_i.append(lo)
            self._log_j.append(hi)
            self._log_ans.append(answers)
            self._log_cum.append(base + np.cumsum(is_first))
            return answers

    def query(self, i: int, j: int) -> float:
        return float(self.query_many(np.array([i]), np.array([j]))[0])

    def was_queried(self, i: int, j: int) -> bool:
        lo, hi = (i, j) if i < j else (j, i)
        return lo * self.instance.params.n + hi in self._answers

    def log_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(i, j, answer, cumulative_unique) over all calls, in query order."""
        if not self._log_i:
            z = np.empty(0, dtype=np.int64)
            return z, z, np.empty(0), z
        return (
            np.concatenate(self._log_i),
            np.concatenate(self._log_j),
            np.concatenate(self._log_ans),
            np.concatenate(self._log_cum),
        )

    def planted_query_count(self) -> int:
        """Unique queried pairs with both endpoints planted (harness instrumentation)."""
        if self.instance.hypothesis != H1:
            raise NotApplicableError("planted query count is undefined under H0")
        return self._planted_hits

    def write_log_csv(self, fh, trial_id: str = "0") -> None:
        fh.write(LOG_CSV_HEADER + "\n")
        li, lj, la, lc = self.log_arrays()
        for step, (a, b, ans, cum) in enumerate(zip(li, lj, la, lc)):
            fh.write(f"{trial_id},{step},{a},{b},{ans!r},{cum}\n")
