"""Words over a finite alphabet and their text encodings."""

from __future__ import annotations

from .errors import InputError

# A word is a tuple of small non-negative ints. Tuples compare
# lexicographically, which is the canonical enumeration order everywhere.
Word = tuple[int, ...]


def format_word(w: Word) -> str:
    """Render a word as text: '0110' for small alphabets, '3.11.2' otherwise."""
    if not w:
        return ""
    if max(w) > 9:
        return ".".join(str(s) for s in w)
    return "".join(str(s) for s in w)


def parse_word(text: str) -> Word:
    """Inverse of format_word. Accepts '' (empty word), '0110', '3.11.2'.

    A bare multi-digit string is read per character, so a one-symbol word
    over an alphabet past 10 does not round-trip; nothing in the package
    re-parses such words, and humans writing configs use alphabets 0-9.
    """
    text = text.strip()
    if not text:
        return ()
    try:
        if "." in text:
            return tuple(int(p) for p in text.split("."))
        return tuple(int(c) for c in text)
    except ValueError as exc:
        raise InputError(f"cannot parse word from {text!r}") from exc


def check_symbols(w: Word, alphabet_size: int) -> None:
    """Raise InputError unless every symbol lies in range(alphabet_size)."""
    for s in w:
        if not isinstance(s, int) or isinstance(s, bool) or not 0 <= s < alphabet_size:
            raise InputError(
                f"symbol {s!r} out of range for alphabet of size {alphabet_size}"
            )
