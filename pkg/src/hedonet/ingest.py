"""Message-stream parsing, time windowing and reply extraction."""

from __future__ import annotations

import json
import logging
from array import array
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Iterator, Union

log = logging.getLogger(__name__)

DEFAULT_ANCHOR = date(2008, 9, 9)
_DAY = 86_400
_U64_MAX = 2**64 - 1

MALFORMED = "malformed"
MISSING_FIELD = "missing_required_field"
INCONSISTENT_REPLY = "inconsistent_reply_fields"
OUT_OF_RANGE = "out_of_range"
DUPLICATE = "duplicate"


class Granularity(str, Enum):
    DAY = "day"
    WEEK = "week"
    MONTH = "month"


@dataclass(frozen=True, slots=True)
class MessageRecord:
    """One parsed message.  ``timestamp`` is UTC epoch seconds."""

    message_id: int
    user_id: int
    text: str
    reply_to_message_id: int | None
    reply_to_user_id: int | None
    timestamp: int

    @property
    def is_reply(self) -> bool:
        return self.reply_to_user_id is not None

    @property
    def created_at(self) -> datetime:
        return datetime.fromtimestamp(self.timestamp, tz=timezone.utc)


@dataclass(frozen=True, slots=True)
class Skip:
    reason: str
    detail: str = ""


@dataclass(frozen=True, slots=True)
class ReplyEvent:
    window_index: int
    from_user: int
    to_user: int


@dataclass(frozen=True)
class WindowSpec:
    granularity: Granularity = Granularity.WEEK
    anchor_date: date = DEFAULT_ANCHOR

    def __post_init__(self):
        object.__setattr__(self, "granularity", Granularity(self.granularity))

    @property
    def anchor_epoch(self) -> int:
        return int(datetime(self.anchor_date.year, self.anchor_date.month, self.anchor_date.day, tzinfo=timezone.utc).timestamp())

    def index_of(self, timestamp: int) -> int | None:
        """Window index for an epoch-second timestamp; None before the anchor."""
        offset = timestamp - self.anchor_epoch
        if offset < 0:
            return None
        if self.granularity is Granularity.DAY:
            return offset // _DAY
        if self.granularity is Granularity.WEEK:
            return offset // (7 * _DAY)
        when = datetime.fromtimestamp(timestamp, tz=timezone.utc)
        return (when.year - self.anchor_date.year) * 12 + when.month - self.anchor_date.month

    def window_start(self, index: int) -> date:
        if self.granularity is Granularity.MONTH:
            months = self.anchor_date.month - 1 + index
            first = date(self.anchor_date.year + months // 12, months % 12 + 1, 1)
            return self.anchor_date if index == 0 else first
        step = 1 if self.granularity is Granularity.DAY else 7
        return date.fromordinal(self.anchor_date.toordinal() + step * index)


# ---------------------------------------------------------------- parsing


def _parse_time(value) -> int:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return int(value)
    value = str(value).strip()
    if value.isdigit():
        return int(value)
    if value.endswith(("Z", "z")):
        value = value[:-1] + "+00:00"
    when = datetime.fromisoformat(value)
    if when.tzinfo is None:
        when = when.replace(tzinfo=timezone.utc)
    return int(when.timestamp())


def _as_id(value) -> int | None:
    if value is None or value == "":
        return None
    if isinstance(value, bool):
        raise ValueError("boolean id")
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError("fractional id")
        value = int(value)
    out = int(value)
    if not 0 < out <= _U64_MAX:
        raise ValueError(f"id out of range: {out}")
    return out


def _build(mid, uid, text, rmid, ruid, when) -> MessageRecord | Skip:
    if mid in (None, "") or uid in (None, "") or when in (None, "") or text is None:
        return Skip(MISSING_FIELD)
    try:
        message_id = _as_id(mid)
        user_id = _as_id(uid)
        reply_mid = _as_id(rmid)
        reply_uid = _as_id(ruid)
        timestamp = _parse_time(when)
    except (TypeError, ValueError, OverflowError) as exc:
        return Skip(MALFORMED, str(exc))
    if not isinstance(text, str):
        return Skip(MALFORMED, "text is not a string")
    if (reply_mid is None) != (reply_uid is None):
        return Skip(INCONSISTENT_REPLY)
    return MessageRecord(message_id, user_id, text, reply_mid, reply_uid, timestamp)


def parse_record(line: Union[bytes, str], fmt: str = "jsonl") -> MessageRecord | Skip:
    """Parse one input line into a MessageRecord, or a Skip naming the reason."""
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError:
            return Skip(MALFORMED, "invalid utf-8")
    line = line.rstrip("\r\n")
    if fmt == "jsonl":
        try:
            obj = json.loads(line)
        except ValueError:
            return Skip(MALFORMED, "invalid json")
        if not isinstance(obj, dict):
            return Skip(MALFORMED, "not an object")
        return _build(
            obj.get("id"),
            obj.get("user_id"),
            obj.get("text"),
            obj.get("in_reply_to_status_id"),
            obj.get("in_reply_to_user_id"),
            obj.get("created_at"),
        )
    if fmt == "tsv":
        cols = line.split("\t", 5)
        if len(cols) != 6:
            return Skip(MALFORMED, f"expected 6 columns, got {len(cols)}")
        mid, uid, rmid, ruid, when, text = cols
        return _build(mid, uid, text, rmid, ruid, when)
    raise ValueError(f"unknown format {fmt!r}")


def format_record(record: MessageRecord, fmt: str = "jsonl") -> str:
    """Serialise a record as one input line (no trailing newline)."""
    stamp = record.created_at.strftime("%Y-%m-%dT%H:%M:%SZ")
    if fmt == "jsonl":
        return json.dumps(
            {
                "id": record.message_id,
                "user_id": record.user_id,
                "text": record.text,
                "in_reply_to_status_id": record.reply_to_message_id,
                "in_reply_to_user_id": record.reply_to_user_id,
                "created_at": stamp,
            },
            ensure_ascii=False,
        )
    if fmt == "tsv":
        if any(c in record.text for c in "\t\r\n"):
            raise ValueError("TSV text may not contain tabs or line breaks")

        def opt(v):
            return "" if v is None else str(v)

        return "\t".join(
            [
                str(record.message_id),
                str(record.user_id),
                opt(record.reply_to_message_id),
                opt(record.reply_to_user_id),
                stamp,
                record.text,
            ]
        )
    raise ValueError(f"unknown format {fmt!r}")


def detect_format(path: Union[str, Path]) -> str:
    name = str(path).lower()
    if name.endswith((".tsv", ".tsv.gz", ".tab")):
        return "tsv"
    return "jsonl"


def read_records(source: Union[str, Path, IO[bytes], Iterable[bytes]], fmt: str | None = None) -> Iterator[MessageRecord | Skip]:
    """Stream parse results from a path, an open binary file or an iterable of lines."""
    if isinstance(source, (str, Path)):
        fmt = fmt or detect_format(source)
        opener = open
        if str(source).endswith(".gz"):
            import gzip

            opener = gzip.open
        with opener(source, "rb") as fh:
            yield from read_records(fh, fmt)
        return
    fmt = fmt or "jsonl"
    for line in source:
        if not line.strip():
            continue
        yield parse_record(line, fmt)


# ---------------------------------------------------------------- windows


@dataclass
class WindowStore:
    """Everything one window contributes downstream."""

    index: int
    reply_from: array = field(default_factory=lambda: array("Q"))
    reply_to: array = field(default_factory=lambda: array("Q"))
    texts: dict[int, list[str]] = field(default_factory=dict)
    n_messages: int = 0
    min_message_id: int | None = None
    max_message_id: int | None = None
    _seen: set = field(default_factory=set, repr=False)

    @property
    def n_replies(self) -> int:
        return len(self.reply_from)

    def events(self) -> Iterator[ReplyEvent]:
        for a, b in zip(self.reply_from, self.reply_to):
            yield ReplyEvent(self.index, a, b)

    def add(self, record: MessageRecord) -> bool:
        """Add a record; False when its id was already seen in this window."""
        mid = record.message_id
        if mid in self._seen:
            return False
        self._seen.add(mid)
        self.n_messages += 1
        if self.min_message_id is None or mid < self.min_message_id:
            self.min_message_id = mid
        if self.max_message_id is None or mid > self.max_message_id:
            self.max_message_id = mid
        if record.reply_to_user_id is not None:
            self.reply_from.append(record.user_id)
            self.reply_to.append(record.reply_to_user_id)
        bucket = self.texts.get(record.user_id)
        if bucket is None:
            self.texts[record.user_id] = [record.text]
        else:
            bucket.append(record.text)
        return True

    def release_ids(self) -> None:
        """Drop the dedup set once no more records will arrive."""
        self._seen = set()


@dataclass
class Partition:
    spec: WindowSpec
    windows: dict[int, WindowStore] = field(default_factory=dict)
    skips: Counter = field(default_factory=Counter)
    n_input: int = 0

    def sorted_windows(self) -> list[WindowStore]:
        return [self.windows[k] for k in sorted(self.windows)]

    @property
    def n_replies(self) -> int:
        return sum(w.n_replies for w in self.windows.values())

    @property
    def n_non_replies(self) -> int:
        return sum(w.n_messages - w.n_replies for w in self.windows.values())


def window_partition(items: Iterable[MessageRecord | Skip], spec: WindowSpec | None = None) -> Partition:
    """Bucket records into windows by timestamp; input order does not matter.

    Skip items are tallied so that replies + non-replies + skips always equals
    the number of items consumed.
    """
    spec = spec or WindowSpec()
    part = Partition(spec)
    windows = part.windows
    skips = part.skips
    n = 0
    for item in items:
        n += 1
        if isinstance(item, Skip):
            skips[item.reason] += 1
            continue
        idx = spec.index_of(item.timestamp)
        if idx is None:
            skips[OUT_OF_RANGE] += 1
            continue
        store = windows.get(idx)
        if store is None:
            store = windows[idx] = WindowStore(idx)
        if not store.add(item):
            skips[DUPLICATE] += 1
    part.n_input = n
    for store in windows.values():
        store.release_ids()
    if skips:
        log.info("skipped records: %s", dict(skips))
    return part


# ---------------------------------------------------------------- coverage


@dataclass(frozen=True)
class Coverage:
    observed: int
    total_estimate: int | None
    percent: float | None

    @property
    def defined(self) -> bool:
        return self.percent is not None

    def to_dict(self) -> dict:
        return {"observed": self.observed, "total_estimate": self.total_estimate, "percent": self.percent}


def estimate_coverage(window: WindowStore | Iterable[MessageRecord]) -> Coverage:
    """Observed share of all messages, taking ids as sequentially assigned.

    The total is estimated as max(id) - min(id); fewer than two records (or a
    zero id span) leave it undefined.
    """
    if isinstance(window, WindowStore):
        observed, lo, hi = window.n_messages, window.min_message_id, window.max_message_id
    else:
        ids = {r.message_id for r in window}
        observed = len(ids)
        lo, hi = (min(ids), max(ids)) if ids else (None, None)
    if observed < 2 or lo is None or hi == lo:
        return Coverage(observed, None, None)
    total = hi - lo
    return Coverage(observed, total, 100.0 * observed / total)


# ---------------------------------------------------------------- artifacts

_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}


def escape_text(text: str) -> str:
    if not any(c in text for c in "\\\t\n\r"):
        return text
    return "".join(_ESCAPES.get(c, c) for c in text)


def unescape_text(text: str) -> str:
    if "\\" not in text:
        return text
    out = []
    it = iter(text)
    for c in it:
        if c == "\\":
            nxt = next(it, "")
            out.append(_UNESCAPES.get(nxt, "\\" + nxt))
        else:
            out.append(c)
    return "".join(out)


def write_replies(store: WindowStore, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a, b in zip(store.reply_from, store.reply_to):
            fh.write(f"{a}\t{b}\n")


def read_replies(path: Union[str, Path]) -> tuple[array, array]:
    src, dst = array("Q"), array("Q")
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            a, b = line.split("\t")
            src.append(int(a))
            dst.append(int(b))
    return src, dst


def write_texts(store: WindowStore, path: Union[str, Path]) -> None:
    """One line per message: user_id <TAB> escaped text; users in id order."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for uid in sorted(store.texts):
            for text in store.texts[uid]:
                fh.write(f"{uid}\t{escape_text(text)}\n")


def iter_texts(path: Union[str, Path]) -> Iterator[tuple[int, str]]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            uid, _, text = line.rstrip("\n").partition("\t")
            yield int(uid), unescape_text(text)
