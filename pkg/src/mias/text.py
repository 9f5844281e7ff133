"""Synopsis text preprocessing: tokenization, stop-word removal, Porter stemming."""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

_TOKEN_RE = re.compile(r"[a-z0-9']+")


@lru_cache(maxsize=1)
def stop_words() -> frozenset[str]:
    """The fixed 318-word stop list shipped with the package."""
    data = resources.files("mias.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w for w in data.split() if w)


def tokenize(raw: str) -> list[str]:
    """Lowercase and split on non-alphanumeric runs, keeping in-word apostrophes."""
    return [t.strip("'") for t in _TOKEN_RE.findall(raw.lower()) if t.strip("'")]


def preprocess_synopsis(raw: str) -> list[str]:
    """Tokenize, drop stop words, and Porter-stem each remaining token in order."""
    stops = stop_words()
    return [porter_stem(t) for t in tokenize(raw) if t not in stops]


class _Porter:
    """Porter's 1980 stemming algorithm, original formulation."""

    def __init__(self) -> None:
        self.b = ""
        self.k = 0
        self.j = 0

    def _cons(self, i: int) -> bool:
        ch = self.b[i]
        if ch in "aeiou":
            return False
        if ch == "y":
            return i == 0 or not self._cons(i - 1)
        return True

    def _m(self) -> int:
        # number of consonant-vowel-consonant sequences in b[0..j]
        n = i = 0
        while True:
            if i > self.j:
                return n
            if not self._cons(i):
                break
            i += 1
        i += 1
        while True:
            while True:
                if i > self.j:
                    return n
                if self._cons(i):
                    break
                i += 1
            i += 1
            n += 1
            while True:
                if i > self.j:
                    return n
                if not self._cons(i):
                    break
                i += 1
            i += 1

    def _vowel_in_stem(self) -> bool:
        return any(not self._cons(i) for i in range(self.j + 1))

    def _doublec(self, j: int) -> bool:
        return j >= 1 and self.b[j] == self.b[j - 1] and self._cons(j)

    def _cvc(self, i: int) -> bool:
        if i < 2 or not self._cons(i) or self._cons(i - 1) or not self._cons(i - 2):
            return False
        return self.b[i] not in "wxy"

    def _ends(self, s: str) -> bool:
        if not self.b[: self.k + 1].endswith(s):
            return False
        self.j = self.k - len(s)
        return True

    def _setto(self, s: str) -> None:
        self.b = self.b[: self.j + 1] + s
        self.k = len(self.b) - 1

    def _r(self, s: str) -> None:
        if self._m() > 0:
            self._setto(s)

    def _step1ab(self) -> None:
        if self.b[self.k] == "s":
            if self._ends("sses"):
                self.k -= 2
            elif self._ends("ies"):
                self._setto("i")
            elif self.b[self.k - 1] != "s":
                self.k -= 1
        if self._ends("eed"):
            if self._m() > 0:
                self.k -= 1
        elif (self._ends("ed") or self._ends("ing")) and self._vowel_in_stem():
            self.k = self.j
            self.b = self.b[: self.k + 1]
            if self._ends("at"):
                self._setto("ate")
            elif self._ends("bl"):
                self._setto("ble")
            elif self._ends("iz"):
                self._setto("ize")
            elif self._doublec(self.k):
                if self.b[self.k] not in "lsz":
                    self.k -= 1
            elif self._m() == 1 and self._cvc(self.k):
                self._setto("e")
        self.b = self.b[: self.k + 1]

    def _step1c(self) -> None:
        if self._ends("y") and self._vowel_in_stem():
            self.b = self.b[: self.k] + "i"

    _STEP2 = [
        ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
        ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
        ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
        ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
        ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
    ]

    _STEP3 = [
        ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
        ("ical", "ic"), ("ful", ""), ("ness", ""),
    ]

    def _map_suffixes(self, table: list[tuple[str, str]]) -> None:
        for suffix, repl in table:
            if self._ends(suffix):
                self._r(repl)
                return

    _STEP4 = [
        "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
        "ment", "ent", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
    ]

    def _step4(self) -> None:
        for suffix in self._STEP4:
            if suffix == "ent":
                # "ion" handled here: needs preceding s or t
                if self._ends("ion") and self.j >= 0 and self.b[self.j] in "st":
                    if self._m() > 1:
                        self.k = self.j
                        self.b = self.b[: self.k + 1]
                    return
            if self._ends(suffix):
                if self._m() > 1:
                    self.k = self.j
                    self.b = self.b[: self.k + 1]
                return

    def _step5(self) -> None:
        self.j = self.k
        if self.b[self.k] == "e":
            a = self._m()
            if a > 1 or (a == 1 and not self._cvc(self.k - 1)):
                self.k -= 1
                self.b = self.b[: self.k + 1]
        if self.b[self.k] == "l" and self._doublec(self.k) and self._m() > 1:
            self.k -= 1
            self.b = self.b[: self.k + 1]

    def stem(self, word: str) -> str:
        if len(word) <= 2:
            return word
        self.b = word
        self.k = len(word) - 1
        self.j = 0
        self._step1ab()
        if self.k > 0:
            self._step1c()
            self._map_suffixes(self._STEP2)
            self._map_suffixes(self._STEP3)
            self._step4()
            self._step5()
        return self.b[: self.k + 1]


def porter_stem(token: str) -> str:
    """Stem one lowercase token with the original Porter algorithm."""
    return _Porter().stem(token)
