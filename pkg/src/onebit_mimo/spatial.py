"""Input-subset selection and the per-user bit-to-symbol-vector codebooks.

Per coherence block, each user's input alphabet (4**K symbol vectors) is
restricted to the subset best served by the current channel.  The single-user
rule keeps the top-L' inputs by cost; the multi-user rule selects users
successively by averaging the cost table over the other users' current sets.
Selected vectors are sorted by decimal value and addressed with the binary
word of their position, so a stream of coded bits maps w bits at a time to
symbol vectors, and back at the receiver by minimum label-bit distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import (
    POPCOUNT4,
    decimal_to_labels,
    gray_decode,
    gray_encode,
    labels_to_decimal,
)


@dataclass(frozen=True)
class UserCodebook:
    """One user's selected input vectors with their position bit-words.

    decimals are sorted ascending; position i encodes the width-bit binary
    word i (the first position is the all-zero word).
    """

    decimals: np.ndarray  # (L',) sorted ascending
    labels: np.ndarray  # (L', K) Gray labels per vector
    n_rx: int

    def __post_init__(self):
        if len(self.decimals) != len(set(self.decimals.tolist())):
            raise ValueError("codebook contains duplicate vectors")
        if not np.all(np.diff(self.decimals) > 0):
            raise ValueError("codebook decimals must be sorted ascending")

    @property
    def size(self):
        return len(self.decimals)

    @property
    def width(self):
        """Bits carried per channel use."""
        return self.size.bit_length() - 1

    @property
    def rate(self):
        """Fraction of the 2K raw QPSK bits retained by the subset restriction."""
        return self.width / (2 * self.n_rx)


def _check_subset_size(l_prime, l_total):
    if l_prime < 1 or l_prime > l_total:
        raise ValueError(f"subset size {l_prime} outside 1..{l_total}")
    if l_prime & (l_prime - 1):
        raise ValueError(f"subset size must be a power of two for bit mapping, got {l_prime}")


def build_codebook(decimals, n_rx):
    """Codebook from a set of per-user decimal values (any order).

    Args:
        decimals: iterable of distinct decimal values in [0, 4**K - 1].
        n_rx: K, symbols per vector.

    Returns:
        UserCodebook sorted ascending by decimal value.
    """
    dec = np.sort(np.asarray(list(decimals), dtype=int))
    _check_subset_size(len(dec), 4**n_rx)
    return UserCodebook(decimals=dec, labels=decimal_to_labels(dec, n_rx), n_rx=n_rx)


def codebook_from_vectors(vectors, n_rx):
    """Codebook from QPSK symbol vectors (rows of shape (L', K))."""
    dec = labels_to_decimal(gray_encode(np.atleast_2d(np.asarray(vectors, dtype=complex))))
    if len(set(dec.tolist())) != len(dec):
        raise ValueError("codebook contains duplicate vectors")
    return build_codebook(dec, n_rx)


def phi_table(lut, n_users, n_rx):
    """Cost tensor with one axis per user, axis m indexed by user m's decimal.

    The lookup table's flat index has user 1 in the least significant base-4
    digits, so a Fortran-order reshape puts user 1 on axis 0.
    """
    per_user = 4**n_rx
    if lut.size != per_user**n_users:
        raise ValueError(
            f"table with {lut.size} rows does not match {n_users} users x 4**{n_rx} inputs"
        )
    return lut.costs.reshape((per_user,) * n_users, order="F")


def _top_by_value(values, count):
    """Indices of the count largest values; ties go to the smaller index."""
    order = np.lexsort((np.arange(len(values)), -np.asarray(values)))
    return np.sort(order[:count])


def select_subset_su(lut, l_prime):
    """Single-user subset: the l_prime inputs with the largest costs.

    Ties break toward the smaller decimal value.  This is the exact maximizer
    of the subset cost sum (top-k of a separable objective).
    """
    if lut.n_users != 1:
        raise ValueError("single-user selection needs a single-user lookup table")
    _check_subset_size(l_prime, lut.size)
    chosen = _top_by_value(lut.costs, l_prime)
    return build_codebook(chosen, lut.n_rx)


def select_subsets_mu(table, subset_sizes):
    """Successive multi-user subset selection on a per-user cost tensor.

    For each user in order, average the cost tensor over all other users
    (already-selected users contribute only their selected sets, later users
    their full sets), keep the subset_sizes[m] best inputs, restrict the
    tensor, and continue.

    Args:
        table: cost tensor, axis m = user m's decimal value (see phi_table).
        subset_sizes: per-user subset sizes, each a power of two.

    Returns:
        List of UserCodebook, one per user.
    """
    table = np.asarray(table, dtype=float)
    n_users = table.ndim
    if len(subset_sizes) != n_users:
        raise ValueError(f"{len(subset_sizes)} subset sizes for {n_users} users")
    n_rx = round(np.log2(table.shape[0]) / 2)
    restricted = table
    books = []
    for m, l_prime in enumerate(subset_sizes):
        if table.shape[m] != table.shape[0]:
            raise ValueError("cost tensor must be the same size along every axis")
        _check_subset_size(l_prime, table.shape[m])
        other_axes = tuple(ax for ax in range(n_users) if ax != m)
        averages = restricted.mean(axis=other_axes)
        chosen = _top_by_value(averages, l_prime)
        books.append(build_codebook(chosen, n_rx))
        restricted = np.take(restricted, chosen, axis=m)
    return books


def map_to_transmit(symbols, lut, codebooks):
    """Transmit vector for one stacked input vector from the selected set.

    Args:
        symbols: (MK,) QPSK symbol vector, users stacked.
        lut: full LookupTable for the block.
        codebooks: per-user UserCodebook list defining the selected set.

    Returns:
        (n_tx,) stored transmit vector.

    Raises:
        ValueError: if some user's sub-vector was not selected (an encoder
            would never produce it).
    """
    labels = gray_encode(np.asarray(symbols, dtype=complex))
    if labels.shape != (lut.n_users * lut.n_rx,):
        raise ValueError(f"expected {lut.n_users * lut.n_rx} symbols, got {labels.shape}")
    for m, book in enumerate(codebooks):
        dec = int(labels_to_decimal(labels[m * book.n_rx : (m + 1) * book.n_rx]))
        if dec not in book.decimals:
            raise ValueError(f"user {m + 1} vector (decimal {dec}) is not in the selected set")
    return lut.lookup(labels)


def sub_lut(lut, codebooks):
    """Restrict a lookup table to the selected product set.

    Returns (flat_indices, vectors, costs) for all combinations of the
    selected per-user inputs, ordered with user 1 fastest.
    """
    per_user = 4**codebooks[0].n_rx
    grids = np.meshgrid(*[cb.decimals for cb in codebooks], indexing="ij")
    weights = per_user ** np.arange(len(codebooks))
    flat = sum(g.reshape(-1, order="F") * w for g, w in zip(grids, weights))
    flat = np.asarray(flat, dtype=int)
    return flat, lut.vectors[flat], lut.costs[flat]


def bits_to_words(bits, width):
    """Pack a bit stream into width-bit words, MSB first.

    A width of zero (singleton codebook) consumes no bits and is an error
    here; callers handle constant transmission separately.
    """
    bits = np.asarray(bits, dtype=int)
    if width == 0:
        raise ValueError("width-0 codebooks carry no bits")
    if bits.size % width:
        raise ValueError(f"bit stream length {bits.size} is not a multiple of {width}")
    blocks = bits.reshape(-1, width)
    return blocks @ (1 << np.arange(width - 1, -1, -1))


def words_to_bits(words, width):
    """Unpack word values into width-bit blocks, MSB first."""
    words = np.asarray(words, dtype=int)
    if width == 0:
        return np.zeros(0, dtype=int)
    shifts = np.arange(width - 1, -1, -1)
    return ((words[:, None] >> shifts) & 1).reshape(-1)


def spatial_encode(bits, codebook):
    """Map one width-bit block to the corresponding QPSK symbol vector."""
    bits = np.asarray(bits, dtype=int)
    if bits.shape != (codebook.width,):
        raise ValueError(f"expected a block of {codebook.width} bits, got shape {bits.shape}")
    word = int(bits @ (1 << np.arange(codebook.width - 1, -1, -1))) if codebook.width else 0
    return gray_decode(codebook.labels[word])


def encode_stream(bits, codebook):
    """Map a whole bit stream to Gray-label rows, one channel use per row."""
    words = bits_to_words(bits, codebook.width)
    return codebook.labels[words]


def spatial_decode(symbols, codebook):
    """Decode one received symbol vector to its bit block.

    Picks the codebook entry at minimum label-bit Hamming distance (over the
    2K Gray bits); ties go to the smaller decimal value.  On a codeword the
    distance is zero and decoding is exact.
    """
    labels = np.atleast_2d(gray_encode(np.asarray(symbols, dtype=complex)))
    words = decode_stream(labels, codebook)
    return words_to_bits(words, codebook.width)


def decode_stream(label_rows, codebook):
    """Decode received Gray-label rows (uses, K) to codebook word values."""
    label_rows = np.atleast_2d(label_rows)
    dist = POPCOUNT4[label_rows[:, None, :] ^ codebook.labels[None, :, :]].sum(axis=2)
    return np.argmin(dist, axis=1)  # first minimum = smallest decimal


def codebook_summary(codebooks):
    """Per-block codebook dump: user index, sorted decimals, bit words."""
    lines = []
    for m, book in enumerate(codebooks, start=1):
        for word in range(book.size):
            bits = format(word, f"0{book.width}b") if book.width else "-"
            lines.append(f"user {m}  word {bits}  decimal {int(book.decimals[word])}")
    return "\n".join(lines)
