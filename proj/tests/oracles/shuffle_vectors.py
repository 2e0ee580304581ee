#!/usr/bin/env python3
"""Reference shuffle vectors for the sampler's platform-determinism test.

Re-implements, independently of the C++ code, the generator contract of
dsel::Rng: the mt19937_64 engine (parameters as published with the C++11
standard), the fnv1a64/splitmix64 stream seeding, rejection-sampled bounded
draws and the descending Fisher-Yates shuffle.  Prints the first ten indices
of a shuffled 20-element pool for each (seed, label).
"""

MASK = (1 << 64) - 1


class MT19937_64:
    N, M = 312, 156
    MATRIX_A = 0xB5026F5AA96619E9
    UPPER, LOWER = 0xFFFFFFFF80000000, 0x7FFFFFFF

    def __init__(self, seed):
        self.mt = [0] * self.N
        self.mt[0] = seed & MASK
        for i in range(1, self.N):
            prev = self.mt[i - 1]
            self.mt[i] = (6364136223846793005 * (prev ^ (prev >> 62)) + i) & MASK
        self.idx = self.N

    def _twist(self):
        for i in range(self.N):
            x = (self.mt[i] & self.UPPER) | (self.mt[(i + 1) % self.N] & self.LOWER)
            xa = x >> 1
            if x & 1:
                xa ^= self.MATRIX_A
            self.mt[i] = self.mt[(i + self.M) % self.N] ^ xa
        self.idx = 0

    def next(self):
        if self.idx >= self.N:
            self._twist()
        y = self.mt[self.idx]
        self.idx += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        return y & MASK


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for c in data:
        h ^= c
        h = (h * 0x100000001B3) & MASK
    return h


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


def engine_for(seed: int, label: str) -> MT19937_64:
    if not label:
        return MT19937_64(seed)
    return MT19937_64(splitmix64(seed ^ fnv1a64(label.encode())))


def below(eng: MT19937_64, n: int) -> int:
    limit = (1 << 64) - ((1 << 64) % n)
    while True:
        x = eng.next()
        if x < limit:
            return x % n


def shuffled(n: int, eng: MT19937_64):
    idx = list(range(n))
    for i in range(n - 1, 0, -1):
        j = below(eng, i + 1)
        idx[i], idx[j] = idx[j], idx[i]
    return idx


if __name__ == "__main__":
    check = MT19937_64(5489)
    for _ in range(9999):
        check.next()
    assert check.next() == 9981545732273789042, "mt19937_64 self-check failed"

    for seed, label in [(42, ""), (43, ""), (0, ""), (42, "class:PER"),
                        (42, "svm-train"), (2**64 - 1, "")]:
        eng = engine_for(seed, label)
        first = [eng.next() for _ in range(2)]
        eng = engine_for(seed, label)
        print(f'{{{seed}ULL, "{label}", {{{", ".join(map(str, shuffled(20, eng)[:10]))}}}, '
              f'{first[0]}ULL, {first[1]}ULL}},')
