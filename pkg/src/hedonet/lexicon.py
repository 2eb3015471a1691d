"""labMT word list handling: loading, stop-word filtering and tokenization."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Union

NEUTRAL = 5.0
DEFAULT_DELTA_H = 1.0

# letters and digits (not underscore) plus the ASCII apostrophe
_TOKEN = re.compile(r"(?:[^\W_]|')+")
_APOSTROPHES = str.maketrans({"’": "'"})


class LexiconError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class LexiconEntry:
    word: str
    h_avg: float
    h_std: float | None = None


class Lexicon(Mapping[str, LexiconEntry]):
    """Immutable word -> entry map.

    ``delta_h`` is the half-width of the neutral band already removed
    (0 for an unfiltered list).
    """

    def __init__(self, entries: Iterable[LexiconEntry], delta_h: float = 0.0):
        table: dict[str, LexiconEntry] = {}
        for e in entries:
            if e.word in table:
                raise LexiconError(f"duplicate word {e.word!r}")
            if not 1.0 <= e.h_avg <= 9.0:
                raise LexiconError(f"h_avg for {e.word!r} outside [1, 9]: {e.h_avg}")
            table[e.word] = e
        self._entries = table
        self._scores = {w: e.h_avg for w, e in table.items()}
        self.delta_h = float(delta_h)

    def __getitem__(self, word: str) -> LexiconEntry:
        return self._entries[word]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        return f"Lexicon({len(self)} words, delta_h={self.delta_h})"

    @property
    def scores(self) -> dict[str, float]:
        """word -> h_avg (shared dict; do not mutate)."""
        return self._scores

    def score(self, word: str) -> float | None:
        return self._scores.get(word)


FilteredLexicon = Lexicon


def _parse_float(raw: str, word: str, line_no: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise LexiconError(f"line {line_no}: cannot parse happiness {raw!r} for {word!r}") from None


def load_lexicon(path: Union[str, Path]) -> Lexicon:
    """Read a labMT-style TSV.

    Either a headed file with ``word`` and ``happiness_average`` columns
    (``happiness_standard_deviation`` optional, other columns ignored;
    description lines before the header are skipped) or a two-column
    word / h_avg file without header.
    """
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\r\n") for ln in fh]
    lines_nonempty = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if not lines_nonempty:
        raise LexiconError(f"{path}: empty lexicon file")

    header_at = None
    for pos, (_, ln) in enumerate(lines_nonempty[:20]):
        if ln.split("\t")[0].strip().lower() == "word":
            header_at = pos
            break

    entries = []
    if header_at is not None:
        cols = [c.strip().lower() for c in lines_nonempty[header_at][1].split("\t")]
        try:
            h_col = cols.index("happiness_average")
        except ValueError:
            raise LexiconError(f"{path}: header lacks happiness_average") from None
        s_col = cols.index("happiness_standard_deviation") if "happiness_standard_deviation" in cols else None
        rows = lines_nonempty[header_at + 1 :]
        for line_no, ln in rows:
            parts = ln.split("\t")
            if len(parts) <= h_col:
                raise LexiconError(f"line {line_no}: too few columns")
            word = parts[0].strip().lower()
            h = _parse_float(parts[h_col], word, line_no)
            std = None
            if s_col is not None and s_col < len(parts) and parts[s_col].strip() not in ("", "--"):
                std = _parse_float(parts[s_col], word, line_no)
            entries.append(LexiconEntry(word, h, std))
    else:
        for line_no, ln in lines_nonempty:
            parts = ln.split("\t")
            if len(parts) < 2:
                raise LexiconError(f"line {line_no}: expected word<TAB>h_avg")
            word = parts[0].strip().lower()
            entries.append(LexiconEntry(word, _parse_float(parts[1], word, line_no)))
    if not entries:
        raise LexiconError(f"{path}: no lexicon rows")
    return Lexicon(entries)


def filter_stop_words(lexicon: Lexicon, delta_h: float = DEFAULT_DELTA_H) -> Lexicon:
    """Remove words strictly inside (5 - delta_h, 5 + delta_h)."""
    if delta_h < 0:
        raise LexiconError("delta_h must be non-negative")
    lo, hi = NEUTRAL - delta_h, NEUTRAL + delta_h
    kept = (e for e in lexicon.values() if not lo < e.h_avg < hi)
    return Lexicon(kept, delta_h=max(delta_h, lexicon.delta_h))


def tokenize(text: str) -> list[str]:
    """Lowercased runs of letters, digits and apostrophes (U+2019 folded to ')."""
    return _TOKEN.findall(text.translate(_APOSTROPHES).lower())
