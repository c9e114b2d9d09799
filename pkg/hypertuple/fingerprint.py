"""
Fingerprints of run reports and coverage maps.

``sha256`` digests the canonical JSON of a report (wall-time fields
removed), so identical configurations give identical digests. ``phash`` is
a perceptual hash of the coverage occupancy bitmap, compared by Hamming
distance.

"""
import hashlib
import io
import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

import imagehash
import numpy as np
from PIL import Image

#: Coverage maps differing in at most this many hash bits are similar.
DEFAULT_HAMMING_TOLERANCE = 4

#: Side of the perceptual hash; the hash holds ``DEFAULT_HASH_SIZE**2`` bits.
DEFAULT_HASH_SIZE = 8

#: Oversampling of the map before the DCT of the perceptual hash.
DEFAULT_HIGH_FREQUENCY_FACTOR = 4

#: Registered fingerprint names.
PHASH = "phash"
SHA256 = "sha256"

#: Report keys excluded from canonical JSON.
VOLATILE_KEYS = frozenset({"wall_time"})

__all__ = [
    "DEFAULT_HAMMING_TOLERANCE",
    "DEFAULT_HASH_SIZE",
    "DEFAULT_HIGH_FREQUENCY_FACTOR",
    "PHASH",
    "SHA256",
    "CoverageHash",
    "Match",
    "ReportDigest",
    "canonical_json",
    "fingerprint_factory",
    "occupancy_png",
]


def _strip(value):
    if isinstance(value, dict):
        return {k: _strip(v) for k, v in value.items() if k not in VOLATILE_KEYS}
    if isinstance(value, list):
        return [_strip(v) for v in value]
    return value


def canonical_json(report):
    """
    The canonical UTF-8 JSON bytes of a report mapping, without wall-time.

    """
    return json.dumps(_strip(report), sort_keys=True, separators=(",", ":"),
                      allow_nan=True).encode("utf-8")


def occupancy_png(report):
    """
    Render the occupancy bitmap of a coverage report as an in-memory PNG.

    Parameters
    ----------
    report : CoverageReport

    Returns
    -------
    io.BytesIO

    """
    image = Image.fromarray(np.ascontiguousarray(report.occupancy_image()))
    buffer = io.BytesIO()
    image.save(buffer, format="png")
    buffer.seek(0)
    return buffer


@dataclass(frozen=True)
class Match:
    """Outcome of comparing two fingerprints."""

    fingerprint: str
    similar: bool
    distance: Optional[int] = None
    tolerance: Optional[int] = None

    def status_msg(self):
        if self.similar or self.distance is None:
            return "" if self.similar else "Fingerprints are not comparable."
        return (f"Coverage map hamming distance of {self.distance} bits > "
                f"hamming tolerance of {self.tolerance} bits.")

    def to_json(self):
        return dict(fingerprint=self.fingerprint, hamming_distance=self.distance,
                    hamming_tolerance=self.tolerance)


class Fingerprint(ABC):
    """
    A named way of hashing an artifact and deciding whether two hashes match.

    """

    name = None

    @abstractmethod
    def of(self, artifact):
        """
        The hexadecimal fingerprint of ``artifact``.

        """

    @abstractmethod
    def match(self, first, second):
        """
        Compare two fingerprints produced by :meth:`of`.

        Returns
        -------
        Match

        """


class ReportDigest(Fingerprint):
    """sha256 of the canonical JSON of a report mapping."""

    name = SHA256

    def of(self, artifact):
        return hashlib.sha256(canonical_json(artifact)).hexdigest()

    def match(self, first, second):
        return Match(self.name, first == second)


class CoverageHash(Fingerprint):
    """
    Perceptual hash of the occupancy bitmap of a :class:`~hypertuple.orbit.CoverageReport`.

    Maps whose hashes differ in at most ``hamming_tolerance`` bits count as
    similar. Hashes of different sizes never match.

    """

    name = PHASH

    def __init__(self, hash_size=DEFAULT_HASH_SIZE,
                 high_freq_factor=DEFAULT_HIGH_FREQUENCY_FACTOR,
                 hamming_tolerance=DEFAULT_HAMMING_TOLERANCE):
        self.hash_size = int(hash_size)
        self.high_freq_factor = int(high_freq_factor)
        self.hamming_tolerance = int(hamming_tolerance)

    def of(self, artifact):
        image = Image.open(occupancy_png(artifact))
        return str(imagehash.phash(image, hash_size=self.hash_size,
                                   highfreq_factor=self.high_freq_factor))

    def match(self, first, second):
        first, second = imagehash.hex_to_hash(first), imagehash.hex_to_hash(second)
        try:
            distance = int(first - second)
        except TypeError:
            # imagehash refuses hashes of different sizes.
            return Match(self.name, False, tolerance=self.hamming_tolerance)
        return Match(self.name, distance <= self.hamming_tolerance, distance,
                     self.hamming_tolerance)


#: Registry of the available fingerprints.
fingerprint_factory = {
    CoverageHash.name: CoverageHash,
    ReportDigest.name: ReportDigest,
}
