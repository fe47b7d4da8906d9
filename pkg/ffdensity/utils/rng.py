"""Counter-based seeded randomness

Every draw is a pure function of (seed, counters...), so results do not depend
on how work is partitioned between workers.
"""
import hashlib
import random


def counter_seed(seed: int, *counters: int) -> int:
    payload = ":".join(str(int(c)) for c in (seed, *counters)).encode("ascii")
    return int.from_bytes(hashlib.sha256(payload).digest()[:16], "big")


def counter_rng(seed: int, *counters: int) -> random.Random:
    return random.Random(counter_seed(seed, *counters))
