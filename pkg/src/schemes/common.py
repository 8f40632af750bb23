"""
Common building blocks shared by the caching schemes:
broadcast transmissions, the transmission log users decode from,
per-user caches, and XOR helpers over byte blocks.
"""

from dataclasses import dataclass, field, fields
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import ConsistencyError
from src.utils.combinatorics import KSubset

TransmissionKey = Tuple[int, KSubset]


# -----------------------------------------------------------
# 1. XOR over byte blocks
# -----------------------------------------------------------

def xor_gather(blocks: np.ndarray, files: np.ndarray, slots: np.ndarray) -> np.ndarray:
    """
    XOR-reduce blocks[files, slots] along the last index axis.

    `blocks` has shape (N, F, L); `files` and `slots` have shape (..., m).
    Returns shape (..., L). An empty term axis reduces to zero blocks.
    """
    gathered = blocks[files, slots]
    return np.bitwise_xor.reduce(gathered, axis=-2)


# -----------------------------------------------------------
# 2. Transmissions
# -----------------------------------------------------------

@dataclass(eq=False)
class Transmission:
    """
    One broadcast message: a label plus the XOR of the identified subfiles.

    `replica` is the j index of the mn scheme (always 0 for grouping) and
    `subset` the label set (A for mn, C for grouping), 0-based.
    `terms` lists the (file, slot) pairs whose blocks were XORed.
    """
    replica: int
    subset: KSubset
    terms: Tuple[Tuple[int, int], ...]
    payload: np.ndarray = field(repr=False)

    @property
    def key(self) -> TransmissionKey:
        return (self.replica, self.subset)

    def payload_hex(self) -> str:
        return self.payload.tobytes().hex()


class TransmissionLog:
    """
    Read-only view of a delivery phase.

    Messages are held as arrays: row i carries label `label_keys[ids[i]]`,
    the XOR payload `payloads[i]` and its (file, slot) terms. Transmission
    objects are only built when the log is iterated.
    """

    def __init__(
        self,
        ids: np.ndarray,
        payloads: np.ndarray,
        files: np.ndarray,
        slots: np.ndarray,
        label_keys: Sequence[TransmissionKey],
        length: int,
    ):
        self.ids = ids
        self.payloads = payloads
        self.files = files
        self.slots = slots
        self.label_keys = label_keys
        self.length = length

    @classmethod
    def from_transmissions(cls, transmissions: Sequence[Transmission], length: int) -> "TransmissionLog":
        """Rebuild a log from explicit messages, in the order given."""
        transmissions = list(transmissions)
        keys = [tx.key for tx in transmissions]
        if len(set(keys)) != len(keys):
            raise ConsistencyError("transmission log contains duplicate labels")
        width = len(transmissions[0].terms) if transmissions else 0
        m = len(transmissions)
        payloads = np.zeros((m, length), dtype=np.uint8)
        for row, tx in enumerate(transmissions):
            payloads[row] = tx.payload
        terms = np.array([tx.terms for tx in transmissions], dtype=np.intp).reshape(m, width, 2)
        return cls(
            ids=np.arange(m, dtype=np.intp),
            payloads=payloads,
            files=terms[:, :, 0],
            slots=terms[:, :, 1],
            label_keys=keys,
            length=length,
        )

    @cached_property
    def keys(self) -> List[TransmissionKey]:
        return [self.label_keys[i] for i in self.ids.tolist()]

    @cached_property
    def _row_of(self) -> Dict[TransmissionKey, int]:
        return {key: row for row, key in enumerate(self.keys)}

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self) -> Iterator[Transmission]:
        for row, (j, subset) in enumerate(self.keys):
            terms = tuple(zip(self.files[row].tolist(), self.slots[row].tolist()))
            yield Transmission(j, subset, terms, self.payloads[row])

    @property
    def transmissions(self) -> List[Transmission]:
        return list(self)

    def __contains__(self, key: TransmissionKey) -> bool:
        return key in self._row_of

    def get(self, key: TransmissionKey) -> Optional[np.ndarray]:
        row = self._row_of.get(key)
        return None if row is None else self.payloads[row]

    def require(self, key: TransmissionKey) -> np.ndarray:
        row = self._row_of.get(key)
        if row is None:
            raise ConsistencyError(f"transmission {key} expected in the log but missing")
        return self.payloads[row]


class MessageLabels:
    """Dense numbering of every label a scheme can send."""

    def __init__(self, keys: Sequence[TransmissionKey]):
        self.keys = list(keys)
        self.ids: Dict[TransmissionKey, int] = {key: i for i, key in enumerate(self.keys)}

    def __len__(self) -> int:
        return len(self.keys)

    def rows(self, log: TransmissionLog) -> np.ndarray:
        """Dense label id of every row of `log`."""
        if log.label_keys is self.keys:
            return log.ids
        try:
            return np.fromiter((self.ids[key] for key in log.keys), dtype=np.intp, count=len(log))
        except KeyError as exc:
            raise ConsistencyError(f"transmission {exc.args[0]} is not a label of this scheme") from None

    def table(self, log: TransmissionLog, required: np.ndarray, pad: int = 0) -> np.ndarray:
        """
        Scatter the log payloads into dense label order.

        Rows for labels missing from the log stay zero, as do `pad` extra rows
        at the end. Raises ConsistencyError if a label in `required` is absent.
        """
        rows = self.rows(log)
        present = np.zeros(len(self), dtype=bool)
        present[rows] = True
        absent = required[~present[required]]
        if len(absent):
            key = self.keys[int(absent[0])]
            raise ConsistencyError(f"transmission {key} expected in the log but missing")
        table = np.zeros((len(self) + pad, log.length), dtype=np.uint8)
        table[rows] = log.payloads
        return table


# -----------------------------------------------------------
# 3. User caches
# -----------------------------------------------------------

@dataclass
class UserCache:
    """
    What one user holds after placement: slot `s` of every file for each
    cached slot s. Blocks are copied out of the store.
    """
    user: int
    slots: Tuple[int, ...]
    blocks: np.ndarray = field(repr=False)  # (N, len(slots), L)
    length: int = 0
    _position: Dict[int, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._position = {slot: pos for pos, slot in enumerate(self.slots)}

    @classmethod
    def materialize(cls, user: int, slots: Iterable[int], store_blocks: np.ndarray) -> "UserCache":
        ordered = tuple(sorted(slots))
        index = np.asarray(ordered, dtype=np.intp)
        blocks = np.ascontiguousarray(store_blocks[:, index, :])
        return cls(user=user, slots=ordered, blocks=blocks, length=store_blocks.shape[2])

    def position(self, slot: int) -> int:
        try:
            return self._position[slot]
        except KeyError:
            raise ConsistencyError(
                f"user {self.user + 1} needs slot {slot} from its cache but does not hold it"
            ) from None

    def get(self, file: int, slot: int) -> np.ndarray:
        return self.blocks[file, self.position(slot)]


class CacheBank(Sequence[UserCache]):
    """The caches of all K users, also stacked as one (K, N, Z, L) array."""

    def __init__(self, caches: Iterable[UserCache]):
        self.caches: List[UserCache] = list(caches)

    def __len__(self) -> int:
        return len(self.caches)

    def __getitem__(self, user):
        return self.caches[user]

    @property
    def length(self) -> int:
        return self.caches[0].length if self.caches else 0

    @cached_property
    def stacked(self) -> np.ndarray:
        sizes = {len(c.slots) for c in self.caches}
        if len(sizes) > 1:
            raise ConsistencyError(f"caches hold different numbers of slots: {sorted(sizes)}")
        return np.stack([c.blocks for c in self.caches])


# -----------------------------------------------------------
# 4. Transcript rendering
# -----------------------------------------------------------

def render_transcript(header: str, lines: Iterable[str]) -> str:
    body = "\n".join([header, *lines])
    return body + "\n"


# -----------------------------------------------------------
# 5. Decoding plans
# -----------------------------------------------------------

@dataclass(frozen=True)
class DecodePlan:
    """
    Demand-independent decoding plan for one user, or for all K users
    stacked along a leading axis.
    """
    cached: np.ndarray        # (Z,) slot indices the user holds, sorted
    missing: np.ndarray       # (m,) slot indices the user lacks
    messages: np.ndarray      # (m,) dense label id of the message carrying each missing slot
    cancel_users: np.ndarray  # (m, w) users whose requested blocks are XORed out
    cancel_pos: np.ndarray    # (m, w) cache positions of those blocks

    @classmethod
    def stack(cls, plans: Sequence["DecodePlan"]) -> "DecodePlan":
        return cls(*(np.stack([getattr(p, f.name) for p in plans]) for f in fields(cls)))

    @property
    def F(self) -> int:
        return self.cached.shape[-1] + self.missing.shape[-1]


def decode_user(plan: DecodePlan, blocks: np.ndarray, files: np.ndarray, wanted: int, table: np.ndarray) -> np.ndarray:
    """
    Rebuild one file as (F, L) blocks from a user's cache `blocks` (N, Z, L)
    and the dense message `table`.
    """
    out = np.empty((plan.F, blocks.shape[-1]), dtype=np.uint8)
    out[plan.cached] = blocks[wanted]
    if len(plan.missing):
        cancel = xor_gather(blocks, files[plan.cancel_users], plan.cancel_pos)
        out[plan.missing] = table[plan.messages] ^ cancel
    return out


def decode_stacked(plan: DecodePlan, stacked: np.ndarray, files: np.ndarray, table: np.ndarray) -> np.ndarray:
    """
    decode_user for every user at once: `plan` and `stacked` (K, N, Z, L)
    carry a leading user axis and user u only reads stacked[u].
    """
    K = stacked.shape[0]
    users = np.arange(K, dtype=np.intp)[:, None]
    out = np.empty((K, plan.F, stacked.shape[-1]), dtype=np.uint8)
    out[users, plan.cached] = stacked[users[:, 0], files]
    if plan.missing.shape[-1]:
        gathered = stacked[users[:, :, None], files[plan.cancel_users], plan.cancel_pos]
        cancel = np.bitwise_xor.reduce(gathered, axis=-2)
        out[users, plan.missing] = table[plan.messages] ^ cancel
    return out
