"""Fixed-work benchmark runner.

Four thread groups (getters, inserters, removers, successor searchers) each
perform the same number of calls against a pluggable dynamic-set adapter,
with per-thread wall time as the measurement.  Key sequences are derived
from (seed, group, thread index) only, so every adapter sees identical work.

Run as a CLI::

    dcveb-bench --getters 4 --inserters 4 --removers 4 --successors 4 \
        --ops 100000 --key-range 100000 --structure dcveb --csv out.csv
"""

from __future__ import annotations

import argparse
import random
import sys
import threading
import time
from dataclasses import dataclass, field
from statistics import mean

from .core import DcvebArray
from .oracle import OracleMap

_GROUPS = ("getter", "inserter", "remover", "successor")
_GROUP_IDS = {g: i + 1 for i, g in enumerate(_GROUPS)}


class LockedOracle:
    """The sorted-map oracle behind one global lock: the globally
    synchronized sequential baseline the concurrent structure is compared
    against."""

    def __init__(self):
        self._map = OracleMap()
        self._lock = threading.Lock()

    def insert(self, key, value):
        with self._lock:
            self._map.insert(key, value)

    def delete(self, key):
        with self._lock:
            self._map.delete(key)

    def get(self, key):
        with self._lock:
            return self._map.get(key)

    def successor(self, key):
        with self._lock:
            return self._map.successor(key)

    def predecessor(self, key):
        with self._lock:
            return self._map.predecessor(key)


_ADAPTERS = {
    "dcveb": DcvebArray,
    "locked-oracle": LockedOracle,
}


def adapters() -> list[str]:
    return sorted(_ADAPTERS)


@dataclass
class WorkloadConfig:
    getters: int = 0
    inserters: int = 0
    removers: int = 0
    successors: int = 0
    ops: int = 1000
    key_range: int = 1000
    structure: str = "dcveb"
    seed: int = 0
    repeats: int = 1

    def validate(self) -> None:
        counts = (self.getters, self.inserters, self.removers, self.successors)
        if any(c < 0 for c in counts) or sum(counts) == 0:
            raise ValueError("need at least one thread across the four groups")
        if self.ops < 1:
            raise ValueError("ops must be >= 1")
        if self.key_range < 1:
            raise ValueError("key_range must be >= 1")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.structure not in _ADAPTERS:
            raise ValueError(
                "unknown structure %r (known: %s)"
                % (self.structure, ", ".join(adapters()))
            )


@dataclass
class ThreadTiming:
    repeat: int
    group: str
    index: int
    millis: float


@dataclass
class RunResult:
    structure: str
    config: WorkloadConfig
    timings: list[ThreadTiming] = field(default_factory=list)

    @property
    def per_thread_millis(self) -> list[float]:
        return [t.millis for t in self.timings]

    @property
    def mean_millis(self) -> float:
        return mean(self.per_thread_millis)

    @property
    def per_group_mean_millis(self) -> dict[str, float]:
        out = {}
        for group in _GROUPS:
            samples = [t.millis for t in self.timings if t.group == group]
            if samples:
                out[group] = mean(samples)
        return out


def _thread_seed(seed: int, group: str, index: int) -> int:
    return seed * 1_000_003 + _GROUP_IDS[group] * 131_071 + index


def thread_keys(seed: int, group: str, index: int, ops: int, key_range: int):
    """The exact key sequence a given worker thread will use."""
    rng = random.Random(_thread_seed(seed, group, index))
    return [rng.randrange(key_range) for _ in range(ops)]


def run_workload(config: WorkloadConfig) -> RunResult:
    config.validate()
    result = RunResult(config.structure, config)
    for repeat in range(config.repeats):
        structure = _ADAPTERS[config.structure]()
        plan = []
        for group, count in zip(_GROUPS, (config.getters, config.inserters,
                                          config.removers, config.successors)):
            for i in range(count):
                plan.append((group, i))
        barrier = threading.Barrier(len(plan))
        timings = [None] * len(plan)

        def worker(slot: int, group: str, index: int):
            rng = random.Random(_thread_seed(config.seed, group, index))
            randrange = rng.randrange
            m = config.key_range
            z = config.ops
            if group == "getter":
                op = structure.get
            elif group == "inserter":
                op = structure.insert
            elif group == "remover":
                op = structure.delete
            else:
                op = structure.successor
            barrier.wait()
            started = time.perf_counter()
            if group == "inserter":
                for _ in range(z):
                    key = randrange(m)
                    op(key, key)
            else:
                for _ in range(z):
                    op(randrange(m))
            elapsed = (time.perf_counter() - started) * 1000.0
            timings[slot] = ThreadTiming(repeat, group, index, elapsed)

        threads = [
            threading.Thread(target=worker, args=(slot, group, index))
            for slot, (group, index) in enumerate(plan)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        result.timings.extend(timings)
    return result


CSV_HEADER = "structure,g,i,r,s,z,m,seed,repeat,group,thread,millis"


def emit_csv(results: list[RunResult], path) -> None:
    """Deterministic row order: (structure, repeat, group, thread)."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(CSV_HEADER + "\n")
            for result in results:
                cfg = result.config
                ordered = sorted(
                    result.timings,
                    key=lambda t: (t.repeat, _GROUP_IDS[t.group], t.index),
                )
                for t in ordered:
                    fh.write(
                        "%s,%d,%d,%d,%d,%d,%d,%d,%d,%s,%d,%.3f\n"
                        % (result.structure, cfg.getters, cfg.inserters,
                           cfg.removers, cfg.successors, cfg.ops, cfg.key_range,
                           cfg.seed, t.repeat, t.group, t.index, t.millis)
                    )
    except OSError as exc:
        raise OSError("cannot write CSV to %s: %s" % (path, exc)) from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcveb-bench",
        description="Fixed-work concurrent ordered-map benchmark",
    )
    parser.add_argument("--getters", type=int, default=0)
    parser.add_argument("--inserters", type=int, default=0)
    parser.add_argument("--removers", type=int, default=0)
    parser.add_argument("--successors", type=int, default=0)
    parser.add_argument("--ops", type=int, default=1000,
                        help="calls per thread")
    parser.add_argument("--key-range", type=int, default=1000,
                        help="keys drawn uniformly from [0, m)")
    parser.add_argument("--structure", default="dcveb",
                        help="adapter name (%s)" % ", ".join(adapters()))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeats", type=int, default=1)
    parser.add_argument("--csv", default=None, help="write per-thread rows here")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    config = WorkloadConfig(
        getters=args.getters, inserters=args.inserters, removers=args.removers,
        successors=args.successors, ops=args.ops, key_range=args.key_range,
        structure=args.structure, seed=args.seed, repeats=args.repeats,
    )
    try:
        config.validate()
    except ValueError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    try:
        result = run_workload(config)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print("run failed: %s" % exc, file=sys.stderr)
        return 1
    print("structure=%s threads g=%d i=%d r=%d s=%d ops=%d key-range=%d repeats=%d"
          % (config.structure, config.getters, config.inserters, config.removers,
             config.successors, config.ops, config.key_range, config.repeats))
    print("mean per-thread time: %.2f ms" % result.mean_millis)
    for group, value in sorted(result.per_group_mean_millis.items(),
                               key=lambda kv: _GROUP_IDS[kv[0]]):
        print("  %-9s mean %.2f ms" % (group, value))
    if args.csv:
        try:
            emit_csv([result], args.csv)
        except OSError as exc:
            print(str(exc), file=sys.stderr)
            return 1
        print("wrote %s" % args.csv)
    return 0


if __name__ == "__main__":
    sys.exit(main())
