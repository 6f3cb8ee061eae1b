"""QPSK constellation with Gray-coded decimal labels, 1-bit quantization and box projection.

Conventions used throughout the package:

* The constellation is the unit-energy set {(+-1 +-1j)/sqrt(2)}.
* Quadrant index of a complex number z is ``2*(Im z < 0) + (Re z < 0)``.
* The Gray label of each quadrant is given by ``LABEL_OF_QUADRANT``; with the
  default identity table the labels are

      (1+1j)/sqrt(2) -> 0,  (-1+1j)/sqrt(2) -> 1,
      (1-1j)/sqrt(2) -> 2,  (-1-1j)/sqrt(2) -> 3,

  which is Gray consistent: symbols sharing a real or imaginary sign differ
  in exactly one label bit.
* The decimal value of a length-K symbol vector is
  ``sum_k 4**(k-1) * label(s_k)``, i.e. the first entry is the least
  significant base-4 digit.
"""

from __future__ import annotations

import numpy as np

#: Half-width of the box spanned by the constellation, 1/sqrt(2).
BOX_HALF_WIDTH = 1.0 / np.sqrt(2.0)

#: Constellation point of each quadrant (index = 2*(Im<0) + (Re<0)).
QUADRANT_SYMBOLS = np.array(
    [1 + 1j, -1 + 1j, 1 - 1j, -1 - 1j], dtype=complex
) * BOX_HALF_WIDTH

#: Gray label assigned to each quadrant.  Kept as module state so that a
#: Gray-consistent relabeling can be swapped in (used by the label-neutrality
#: tests); everything downstream reads it at call time.
LABEL_OF_QUADRANT = np.array([0, 1, 2, 3])

#: Number of set bits of a 2-bit word; Hamming distance between two labels
#: is POPCOUNT4[a ^ b].
POPCOUNT4 = np.array([0, 1, 1, 2])


def _check_finite(z):
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise ValueError("input contains non-finite entries")
    return z


def _quadrant(z):
    """Quadrant index of each entry; boundary (zero) components count as positive."""
    re_neg = np.real(z) < 0
    im_neg = np.imag(z) < 0
    return 2 * im_neg.astype(int) + re_neg.astype(int)


def quantize(z):
    """1-bit quantize: keep only the signs of real and imaginary parts.

    Per entry returns (sign(Re z) + 1j*sign(Im z))/sqrt(2) with sign(0) = +1,
    so the output always lies on the QPSK constellation.

    Args:
        z: scalar or array of complex numbers, finite.

    Returns:
        Array (or scalar) of constellation points, same shape as z.
    """
    z = _check_finite(z)
    out = QUADRANT_SYMBOLS[_quadrant(z)]
    return out[()] if out.ndim == 0 else out


def project_box(z):
    """Clamp real and imaginary parts independently to [-1/sqrt(2), 1/sqrt(2)]."""
    z = _check_finite(z)
    b = BOX_HALF_WIDTH
    out = np.clip(np.real(z), -b, b) + 1j * np.clip(np.imag(z), -b, b)
    return out[()] if out.ndim == 0 else out


def in_box(z, tol=0.0):
    """True if every entry's real and imaginary part is inside the closed box."""
    z = np.asarray(z, dtype=complex)
    b = BOX_HALF_WIDTH + tol
    return bool(np.all(np.abs(np.real(z)) <= b) and np.all(np.abs(np.imag(z)) <= b))


def gray_encode(symbols):
    """Gray-coded decimal label (0..3) of each QPSK symbol.

    Args:
        symbols: scalar or array of constellation points.

    Returns:
        Integer label array of the same shape.

    Raises:
        ValueError: if an entry is not a constellation point.
    """
    z = np.asarray(symbols, dtype=complex)
    quad = _quadrant(z)
    if not np.allclose(z, QUADRANT_SYMBOLS[quad], rtol=0.0, atol=1e-9):
        raise ValueError("input is not a QPSK constellation point")
    out = LABEL_OF_QUADRANT[quad]
    return out[()] if out.ndim == 0 else out


def gray_decode(labels):
    """Constellation point for each Gray label; inverse of gray_encode.

    Raises:
        ValueError: if a label is outside {0, 1, 2, 3}.
    """
    lab = np.asarray(labels)
    if not np.issubdtype(lab.dtype, np.integer):
        if not np.all(lab == np.floor(lab)):
            raise ValueError("labels must be integers")
        lab = lab.astype(int)
    if np.any(lab < 0) or np.any(lab > 3):
        raise ValueError("Gray label out of range 0..3")
    quadrant_of_label = np.argsort(LABEL_OF_QUADRANT)
    out = QUADRANT_SYMBOLS[quadrant_of_label[lab]]
    return out[()] if out.ndim == 0 else out


def label_bits(labels):
    """Expand labels to bits, MSB first: shape (..., 2)."""
    lab = np.asarray(labels)
    return np.stack([(lab >> 1) & 1, lab & 1], axis=-1)


def labels_to_decimal(labels):
    """Decimal value of a label vector (last axis); entry k weighs 4**k."""
    lab = np.asarray(labels)
    if lab.shape[-1] == 0:
        raise ValueError("empty symbol vector has no decimal value")
    weights = 4 ** np.arange(lab.shape[-1])
    return np.tensordot(lab, weights, axes=([-1], [0]))


def decimal_to_labels(decimals, k):
    """Base-4 digits (least significant first) of each decimal value: shape (..., k)."""
    d = np.asarray(decimals)
    if np.any(d < 0) or np.any(d >= 4**k):
        raise ValueError(f"decimal value out of range 0..{4**k - 1}")
    return (d[..., None] >> (2 * np.arange(k))) & 3


def decimal_value(symbols):
    """Decimal value of a QPSK symbol vector: sum_k 4**(k-1) * label(s_k).

    Args:
        symbols: array of constellation points; the last axis is the vector.

    Returns:
        Integer scalar (1-D input) or array of decimal values in
        [0, 4**K - 1].
    """
    z = np.asarray(symbols, dtype=complex)
    if z.ndim == 0 or z.shape[-1] == 0:
        raise ValueError("decimal_value needs a non-empty symbol vector")
    val = labels_to_decimal(gray_encode(z))
    return int(val) if np.ndim(val) == 0 else val


def rotation_label_map():
    """Label permutation induced by multiplying every symbol by 1j."""
    return gray_encode(1j * gray_decode(np.arange(4)))
