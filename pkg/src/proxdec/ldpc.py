"""Binary linear codes over GF(2).

Parity-check matrices are stored as adjacency lists: ``rows[i]`` is the set
A(i) of bit positions checked by row ``i`` and ``cols[j]`` is the set B(j) of
checks touching bit ``j``. Everything is 0-based in memory; the alist format
on disk is 1-based.

Bit to bipolar mapping is fixed throughout the package: bit 0 -> +1,
bit 1 -> -1, and ``sign(0)`` is taken as +1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


class AlistError(ValueError):
    """Malformed alist document."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class ParityCheckMatrix:
    m: int
    n: int
    rows: tuple[tuple[int, ...], ...]
    cols: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.rows) != self.m or len(self.cols) != self.n:
            raise ValueError("adjacency list lengths do not match (m, n)")
        for i, row in enumerate(self.rows):
            if len(set(row)) != len(row):
                raise ValueError(f"duplicate entry in row {i}")
            if any(j < 0 or j >= self.n for j in row):
                raise ValueError(f"column index out of range in row {i}")
        for j, col in enumerate(self.cols):
            if len(set(col)) != len(col):
                raise ValueError(f"duplicate entry in column {j}")
            if any(i < 0 or i >= self.m for i in col):
                raise ValueError(f"row index out of range in column {j}")
        edges_r = {(i, j) for i, row in enumerate(self.rows) for j in row}
        edges_c = {(i, j) for j, col in enumerate(self.cols) for i in col}
        if edges_r != edges_c:
            raise ValueError("row and column adjacency lists disagree")

    @classmethod
    def from_rows(cls, n: int, rows) -> ParityCheckMatrix:
        rows = tuple(tuple(sorted(int(j) for j in r)) for r in rows)
        cols: list[list[int]] = [[] for _ in range(n)]
        for i, row in enumerate(rows):
            for j in row:
                if j < 0 or j >= n:
                    raise ValueError(f"column index {j} out of range in row {i}")
                cols[j].append(i)
        return cls(len(rows), n, rows, tuple(tuple(c) for c in cols))

    @classmethod
    def from_dense(cls, H) -> ParityCheckMatrix:
        H = np.asarray(H)
        if H.ndim != 2:
            raise ValueError("parity-check matrix must be 2-D")
        return cls.from_rows(H.shape[1], [np.flatnonzero(r % 2) for r in H])

    @property
    def nnz(self) -> int:
        """Number of ones in H (the edge count of the Tanner graph)."""
        return sum(len(r) for r in self.rows)

    @cached_property
    def dense(self) -> np.ndarray:
        H = np.zeros((self.m, self.n), dtype=np.uint8)
        for i, row in enumerate(self.rows):
            H[i, list(row)] = 1
        return H

    @cached_property
    def row_index(self) -> np.ndarray:
        """(m, max row degree) index array; short rows are padded with ``n``."""
        width = max((len(r) for r in self.rows), default=0)
        idx = np.full((self.m, width), self.n, dtype=np.intp)
        for i, row in enumerate(self.rows):
            idx[i, : len(row)] = row
        return idx

    @cached_property
    def row_mask(self) -> np.ndarray:
        return self.row_index < self.n

    def __eq__(self, other):
        if not isinstance(other, ParityCheckMatrix):
            return NotImplemented
        return (self.m, self.n, self.rows) == (other.m, other.n, other.rows)

    def __hash__(self):
        return hash((self.m, self.n, self.rows))

    def __repr__(self):
        return f"ParityCheckMatrix(m={self.m}, n={self.n}, nnz={self.nnz})"


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Systematic encoder ``[I_k | P]`` in permuted coordinates.

    Column ``t`` of the encoder output lands on bit ``perm[t]`` of the
    original code, so ``codeword[perm] = message @ rows (mod 2)``.
    """

    k: int
    n: int
    rows: np.ndarray
    perm: np.ndarray

    def in_code_order(self) -> np.ndarray:
        """Generator rows with columns in the original H ordering."""
        G = np.zeros_like(self.rows)
        G[:, self.perm] = self.rows
        return G


def bits_to_bipolar(bits) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(bits, dtype=float)


def bipolar_to_bits(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.all(np.abs(x) == 1.0):
        raise ValueError("word is not bipolar (entries must be exactly +1 or -1)")
    return (x < 0).astype(np.uint8)


def hard_sign(x) -> np.ndarray:
    """Sign with the package-wide tie break sign(0) = +1."""
    return np.where(np.asarray(x) < 0, -1.0, 1.0)


def syndrome(H: ParityCheckMatrix, bits) -> np.ndarray:
    bits = np.asarray(bits)
    if bits.shape != (H.n,):
        raise ValueError(f"expected {H.n} bits, got shape {bits.shape}")
    padded = np.append(bits.astype(np.uint8) & 1, 0)
    return np.bitwise_xor.reduce(padded[H.row_index], axis=1).astype(np.uint8)


def is_codeword(H: ParityCheckMatrix, x) -> bool:
    """True iff the bipolar word ``x`` belongs to the bipolar code C(H)."""
    return not syndrome(H, bipolar_to_bits(x)).any()


def gf2_rref(M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2); returns (R, pivot columns)."""
    R = (np.asarray(M, dtype=np.uint8) & 1).copy()
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.flatnonzero(R[r:, c])
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            R[[r, p]] = R[[p, r]]
        others = np.flatnonzero(R[:, c])
        others = others[others != r]
        R[others] ^= R[r]
        pivots.append(c)
        r += 1
    return R[:r], pivots


def gf2_rank(M) -> int:
    return len(gf2_rref(M)[1])


def generator_from_parity(H: ParityCheckMatrix) -> GeneratorMatrix:
    """Systematic generator for C(H); rank-deficient H just yields a larger k."""
    R, pivots = gf2_rref(H.dense)
    free = [c for c in range(H.n) if c not in set(pivots)]
    k = len(free)
    P = R[:, free].T if pivots else np.zeros((k, 0), dtype=np.uint8)
    rows = np.hstack([np.eye(k, dtype=np.uint8), P]).astype(np.uint8)
    perm = np.array(free + pivots, dtype=np.intp)
    return GeneratorMatrix(k=k, n=H.n, rows=rows, perm=perm)


def encode(G: GeneratorMatrix, message) -> np.ndarray:
    message = np.asarray(message, dtype=np.uint8)
    if message.shape != (G.k,):
        raise ValueError(f"expected {G.k} message bits, got shape {message.shape}")
    out = np.zeros(G.n, dtype=np.uint8)
    out[G.perm] = (message.astype(np.int64) @ G.rows) % 2
    return out


def random_codeword(G: GeneratorMatrix, rng: np.random.Generator) -> np.ndarray:
    """Uniformly distributed bipolar codeword."""
    return bits_to_bipolar(encode(G, rng.integers(0, 2, size=G.k, dtype=np.uint8)))


def hamming_7_4() -> ParityCheckMatrix:
    """(7,4,3) Hamming code; column j is the binary expansion of j+1, LSB in row 0."""
    return ParityCheckMatrix.from_dense([[((j + 1) >> i) & 1 for j in range(7)] for i in range(3)])


def repetition_2() -> ParityCheckMatrix:
    return ParityCheckMatrix.from_rows(2, [(0, 1)])


def _overlapping_row_pairs(rows: list[list[int]], n: int) -> np.ndarray:
    """Row pairs sharing two or more columns, i.e. the 4-cycles of the Tanner graph."""
    D = np.zeros((len(rows), n), dtype=np.int32)
    for i, r in enumerate(rows):
        D[i, r] = 1
    overlap = np.triu(D @ D.T, k=1)
    return np.argwhere(overlap >= 2)


def _conflicts(sets, rset, skip) -> int:
    return sum(len(rset & s) >= 2 for i, s in enumerate(sets) if i not in skip)


def make_regular_ldpc(
    n: int,
    wc: int,
    wr: int,
    rng: np.random.Generator,
    max_retries: int = 100,
    cycle_passes: int = 2000,
) -> ParityCheckMatrix:
    """Random (wc, wr)-regular parity-check matrix by socket permutation.

    Every bit gets ``wc`` sockets; a random permutation deals them into rows of
    ``wr``. Parallel edges are removed by swapping sockets between rows, then
    a bounded number of swaps try to break 4-cycles. The result is exactly
    regular but not guaranteed to be 4-cycle free.
    """
    if n <= 0 or wc <= 0 or wr <= 0:
        raise ValueError("n, wc and wr must be positive")
    if (n * wc) % wr:
        raise ValueError(f"n*wc = {n * wc} is not divisible by wr = {wr}")
    if wr > n:
        raise ValueError("row weight exceeds code length")
    m = n * wc // wr

    for _ in range(max_retries):
        sockets = rng.permutation(np.repeat(np.arange(n), wc))
        rows = [list(sockets[i * wr : (i + 1) * wr]) for i in range(m)]
        if _repair(rows, rng, lambda r: len(set(r)) < len(r), wr * m * 4):
            break
    else:
        raise RuntimeError(f"could not build a simple ({wc},{wr}) graph for n={n}")

    sets = [set(r) for r in rows]
    for _ in range(cycle_passes):
        bad = _overlapping_row_pairs(rows, n)
        if len(bad) == 0:
            break
        a, b = bad[rng.integers(len(bad))]
        shared = sorted(sets[a] & sets[b])
        j = shared[rng.integers(len(shared))]
        c = int(rng.integers(m))
        if c in (a, b) or j in sets[c]:
            continue
        cands = [t for t in rows[c] if t not in sets[a]]
        if not cands:
            continue
        t = cands[rng.integers(len(cands))]
        # move bit j from row a to row c and bit t the other way
        new_a = sets[a] - {j} | {t}
        new_c = sets[c] - {t} | {j}
        skip = {a, c}
        before = _conflicts(sets, sets[a], skip) + _conflicts(sets, sets[c], skip)
        before += len(sets[a] & sets[c]) >= 2
        after = _conflicts(sets, new_a, skip) + _conflicts(sets, new_c, skip)
        after += len(new_a & new_c) >= 2
        if after <= before:
            rows[a][rows[a].index(j)] = t
            rows[c][rows[c].index(t)] = j
            sets[a], sets[c] = new_a, new_c

    return ParityCheckMatrix.from_rows(n, rows)


def _repair(rows, rng, is_bad, budget) -> bool:
    m = len(rows)
    for _ in range(budget):
        bad = [i for i, r in enumerate(rows) if is_bad(r)]
        if not bad:
            return True
        a = bad[0]
        seen = set()
        dup = next(j for j in rows[a] if j in seen or seen.add(j))
        c = int(rng.integers(m))
        if c == a:
            continue
        pos_c = int(rng.integers(len(rows[c])))
        t = rows[c][pos_c]
        if t in rows[a] or dup in rows[c]:
            continue
        rows[a][rows[a].index(dup)] = t
        rows[c][pos_c] = dup
    return not any(is_bad(r) for r in rows)


def emit_alist(H: ParityCheckMatrix) -> str:
    """Serialise H to alist text (1-based, no zero padding)."""
    col_deg = [len(c) for c in H.cols]
    row_deg = [len(r) for r in H.rows]
    lines = [
        f"{H.n} {H.m}",
        f"{max(col_deg, default=0)} {max(row_deg, default=0)}",
        " ".join(map(str, col_deg)),
        " ".join(map(str, row_deg)),
    ]
    lines += [" ".join(str(i + 1) for i in c) for c in H.cols]
    lines += [" ".join(str(j + 1) for j in r) for r in H.rows]
    return "\n".join(lines) + "\n"


def parse_alist(text: str) -> ParityCheckMatrix:
    """Parse alist text. Zero entries are padding and ignored."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.strip():
            try:
                lines.append((lineno, [int(tok) for tok in raw.split()]))
            except ValueError:
                raise AlistError(f"non-integer token in {raw.strip()!r}", lineno) from None
    if len(lines) < 4:
        raise AlistError("truncated header", lines[-1][0] if lines else None)

    def expect(idx, count, what):
        lineno, vals = lines[idx]
        if len(vals) != count:
            raise AlistError(f"expected {count} values for {what}, got {len(vals)}", lineno)
        return vals

    n, m = expect(0, 2, "'n m'")
    if n <= 0 or m <= 0:
        raise AlistError("dimensions must be positive", lines[0][0])
    max_c, max_r = expect(1, 2, "max degrees")
    col_deg = expect(2, n, "column degrees")
    row_deg = expect(3, m, "row degrees")
    if len(lines) < 4 + n + m:
        raise AlistError(f"expected {n + m} neighbour lines, found {len(lines) - 4}", lines[-1][0])

    def neighbours(idx, limit, degree, max_deg, what):
        lineno, vals = lines[idx]
        if len(vals) > max(max_deg, degree):
            raise AlistError(f"too many entries in {what}", lineno)
        entries = [v for v in vals if v != 0]
        if len(entries) != degree:
            raise AlistError(f"{what} lists {len(entries)} entries, degree says {degree}", lineno)
        for v in entries:
            if v < 1 or v > limit:
                raise AlistError(f"index {v} out of range 1..{limit} in {what}", lineno)
        if len(set(entries)) != len(entries):
            raise AlistError(f"duplicate neighbour in {what}", lineno)
        return [v - 1 for v in entries]

    cols = [neighbours(4 + j, m, col_deg[j], max_c, f"column {j + 1}") for j in range(n)]
    rows = [neighbours(4 + n + i, n, row_deg[i], max_r, f"row {i + 1}") for i in range(m)]
    if len(lines) > 4 + n + m:
        raise AlistError("trailing data after row lists", lines[4 + n + m][0])

    H = ParityCheckMatrix.from_rows(n, rows)
    for j, col in enumerate(cols):
        if tuple(sorted(col)) != H.cols[j]:
            raise AlistError(f"column {j + 1} disagrees with row lists", lines[4 + j][0])
    return H


def load_alist(path) -> ParityCheckMatrix:
    with open(path) as fh:
        return parse_alist(fh.read())


def save_alist(H: ParityCheckMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(emit_alist(H))
