"""The KCS-PRNG: sequence generator output masked by elliptic-curve
x-coordinates, with a fresh curve pair per boot and re-keying every
100 000 output bits.

Output position is a single running cursor.  Bit ``pos`` belongs to block
``pos // 256``; even blocks use the first curve's mask, odd blocks the
second.  Requests of 256 bits or more XOR mask bits MSB-first within the
block; shorter requests read the mask from its LSB upward.  Reseeding
replaces the sequence generator state and both masks but keeps the curve
pair and the cursor.
"""

from __future__ import annotations

import logging
import os
import secrets
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .curvestore import CurveTable, TableLockError, select_pair, select_pair_from_file
from .ecc import FIELD_BITS, IDENTITY, CurveParams, field_convert, scalar_mul
from .seqgen import IV_BITS, KEY_BITS, SequenceGenerator, init_seqgen

log = logging.getLogger(__name__)

RESEED_INTERVAL = 100_000
BLOCK_BITS = 256
SEED_BITS = KEY_BITS + IV_BITS
SEED_BYTES = 72


class EntropyExhaustedError(Exception):
    """The entropy source cannot supply another seed."""

    def __init__(self, msg: str, partial: Optional[np.ndarray] = None):
        super().__init__(msg)
        self.partial = partial


class Seed:
    """574 bits of seed material, zeroed by :meth:`shred` once consumed."""

    __slots__ = ("key", "iv")

    def __init__(self, key, iv):
        if len(key) != KEY_BITS or len(iv) != IV_BITS:
            raise ValueError(f"seed needs {KEY_BITS} key bits and {IV_BITS} iv bits")
        self.key = bytearray(int(b) & 1 for b in key)
        self.iv = bytearray(int(b) & 1 for b in iv)

    @classmethod
    def from_bytes(cls, data) -> Seed:
        if len(data) < SEED_BYTES:
            raise ValueError(f"seed segment needs {SEED_BYTES} bytes, got {len(data)}")
        bits = np.unpackbits(np.frombuffer(bytes(data[:SEED_BYTES]), dtype=np.uint8))
        return cls(bits[:KEY_BITS], bits[KEY_BITS:SEED_BITS])

    def to_bytes(self) -> bytes:
        bits = np.zeros(SEED_BYTES * 8, dtype=np.uint8)
        bits[:KEY_BITS] = np.frombuffer(bytes(self.key), dtype=np.uint8)
        bits[KEY_BITS:SEED_BITS] = np.frombuffer(bytes(self.iv), dtype=np.uint8)
        return np.packbits(bits).tobytes()

    def shred(self) -> None:
        for buf in (self.key, self.iv):
            buf[:] = bytes(len(buf))


class EntropySource:
    def pull(self) -> Seed:
        raise NotImplementedError


class SeedFileSource(EntropySource):
    """Reads consecutive 72-byte seed segments; never reuses a segment."""

    def __init__(self, path: Union[str, os.PathLike]):
        self.path = Path(path)
        try:
            self._data = bytearray(self.path.read_bytes())
        except OSError as exc:
            raise EntropyExhaustedError(f"cannot read seed file {self.path}: {exc}") from exc
        if len(self._data) < SEED_BYTES:
            raise EntropyExhaustedError(
                f"seed file {self.path} holds {len(self._data)} bytes, need at least {SEED_BYTES}")
        self._offset = 0

    @property
    def remaining(self) -> int:
        return (len(self._data) - self._offset) // SEED_BYTES

    def pull(self) -> Seed:
        end = self._offset + SEED_BYTES
        if end > len(self._data):
            raise EntropyExhaustedError(
                f"seed file {self.path} exhausted after {self._offset // SEED_BYTES} seeds")
        seed = Seed.from_bytes(self._data[self._offset:end])
        self._data[self._offset:end] = bytes(SEED_BYTES)
        self._offset = end
        return seed


class BytesSource(EntropySource):
    """In-memory counterpart of :class:`SeedFileSource`."""

    def __init__(self, data: bytes):
        self._data = bytearray(data)
        self._offset = 0

    def pull(self) -> Seed:
        end = self._offset + SEED_BYTES
        if end > len(self._data):
            raise EntropyExhaustedError("seed buffer exhausted")
        seed = Seed.from_bytes(self._data[self._offset:end])
        self._data[self._offset:end] = bytes(SEED_BYTES)
        self._offset = end
        return seed


class OsEntropySource(EntropySource):
    """Operating-system randomness.  Convenient, but not the physical
    entropy harvester the design assumes."""

    def pull(self) -> Seed:
        return Seed.from_bytes(secrets.token_bytes(SEED_BYTES))


def _mask_bits(value: int) -> np.ndarray:
    return np.unpackbits(np.frombuffer(value.to_bytes(32, "big"), dtype=np.uint8))


def derive_mask(seqgen: SequenceGenerator, curve: CurveParams) -> int:
    """Clock 256 bits into a scalar and return x of scalar*G."""
    z = seqgen.bits_int(FIELD_BITS)
    k = field_convert(z, curve)
    while True:
        P = scalar_mul(k, curve.G, curve)
        if P is not IDENTITY:
            return P.x
        k += 1


class KcsPrng:
    def __init__(self, curve1: CurveParams, curve2: CurveParams, entropy: EntropySource):
        self.curve1 = curve1
        self.curve2 = curve2
        self.entropy = entropy
        self.seqgen: Optional[SequenceGenerator] = None
        self.pb1 = 0
        self.pb2 = 0
        self._el1 = self._el2 = None
        self.position = 0
        self.bits_since_seed = 0
        self.bits_emitted = 0
        self.seeds_consumed = 0
        self.used_block_path = False
        self.curve_indices: Optional[tuple[int, int]] = None

    @classmethod
    def boot(cls, entropy: EntropySource, table: Union[CurveTable, str, os.PathLike],
             freeze: bool = False) -> KcsPrng:
        """Select a curve pair from ``table`` and seed from ``entropy``.

        ``table`` may be a path (locked, loaded, updated on disk) or an
        in-memory :class:`CurveTable`.  The seed is pulled before the table
        is touched so that a dry entropy source leaves the statuses alone.
        """
        seed = entropy.pull()
        try:
            if isinstance(table, CurveTable):
                if table.path is not None and not freeze:
                    try:
                        with table.lock():
                            pair = select_pair(table, freeze=freeze)
                    except TimeoutError:
                        raise TableLockError(f"could not lock {table.path}") from None
                else:
                    pair = select_pair(table, persist=False, freeze=freeze)
            else:
                _, pair = select_pair_from_file(table, freeze=freeze)
            gen = cls(pair[0].curve, pair[1].curve, entropy)
            log.debug("booted with curve records %d and %d", pair[0].index, pair[1].index)
            gen.curve_indices = (pair[0].index, pair[1].index)
            gen._seed_with(seed)
        finally:
            seed.shred()
        return gen

    def _seed_with(self, seed: Seed) -> None:
        self.seqgen = init_seqgen(seed.key, seed.iv)
        seed.shred()
        self.seeds_consumed += 1
        self.derive_masks()
        self.bits_since_seed = 0

    def derive_masks(self) -> None:
        self.pb1 = derive_mask(self.seqgen, self.curve1)
        self.pb2 = derive_mask(self.seqgen, self.curve2)
        self._el1 = _mask_bits(self.pb1)
        self._el2 = _mask_bits(self.pb2)

    @property
    def pb1_bits(self) -> str:
        return format(self.pb1, f"0{FIELD_BITS}b")

    @property
    def pb2_bits(self) -> str:
        return format(self.pb2, f"0{FIELD_BITS}b")

    @property
    def block_index(self) -> int:
        return self.position // BLOCK_BITS

    def reseed(self) -> None:
        self._seed_with(self.entropy.pull())

    def generate(self, n: int) -> np.ndarray:
        """Next ``n`` output bits as a uint8 array of 0/1 values."""
        if n < 1:
            raise ValueError("bit count must be >= 1")
        lsb_first = n < BLOCK_BITS
        if not lsb_first:
            self.used_block_path = True
        out = np.empty(n, dtype=np.uint8)
        done = 0
        while done < n:
            if self.bits_since_seed >= RESEED_INTERVAL:
                try:
                    self.reseed()
                except EntropyExhaustedError as exc:
                    raise EntropyExhaustedError(str(exc), out[:done].copy()) from exc
            seg = min(n - done, RESEED_INTERVAL - self.bits_since_seed)
            stream = self.seqgen.bits(seg)
            pos = self.position + np.arange(seg, dtype=np.int64)
            offset = pos & (BLOCK_BITS - 1)
            if lsb_first:
                offset = (BLOCK_BITS - 1) - offset
            odd = ((pos >> 8) & 1).astype(bool)
            mask = np.where(odd, self._el2[offset], self._el1[offset])
            out[done:done + seg] = stream ^ mask
            done += seg
            self.position += seg
            self.bits_since_seed += seg
            self.bits_emitted += seg
        return out

    def generate_bytes(self, nbytes: int) -> bytes:
        return np.packbits(self.generate(8 * nbytes)).tobytes()

    def keyspace_exponent(self) -> int:
        """log2 of the key space for the seeds consumed so far."""
        per_seed = 401 + (256 if self.used_block_path else 128)
        return per_seed * self.seeds_consumed

    def diagnostics(self) -> dict:
        return {
            "seeds_consumed": self.seeds_consumed,
            "bits_emitted": self.bits_emitted,
            "bits_since_seed": self.bits_since_seed,
            "block_index": self.block_index,
            "keyspace_log2": self.keyspace_exponent(),
        }


def boot(entropy: EntropySource, table, freeze: bool = False) -> KcsPrng:
    return KcsPrng.boot(entropy, table, freeze=freeze)


def bits_to_bytes(bits: np.ndarray) -> bytes:
    """Pack MSB-first; a trailing partial byte is zero-padded."""
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()
