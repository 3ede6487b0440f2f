"""Candidate handle synthesis from a seed lexicon and previously observed handles.

The vocabulary is the union of normalized lexicon terms and the underscore
fragments of observed handles. Candidates are single fragments, adjacent
composites of each observed handle, ordered pairwise composites, and an
optional number of sampled three-fragment compositions, filtered by the
platform's public-handle rule and shuffled with a seeded permutation.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import EmptyLexicon

HANDLE_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]{4,31}")
_DISALLOWED = re.compile(r"[^a-z0-9_]")

HIGHER_ORDER_ARITY = 3


@dataclass(frozen=True)
class CandidateSet:
    candidates: tuple[str, ...]
    seed: int

    def __len__(self) -> int:
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)


def handle_ok(candidate: str) -> bool:
    return HANDLE_RE.fullmatch(candidate) is not None


def _fragments(handle: str) -> list[str]:
    return [f.lower() for f in handle.split("_") if f]


def split_handles(handles: Iterable[str]) -> set[str]:
    """Union of the lowercased underscore-separated fragments of every handle."""
    out: set[str] = set()
    for h in handles:
        out.update(_fragments(h))
    return out


def valid_fragments(tokens: Iterable[str]) -> set[str]:
    """Lowercase, strip characters outside ``[a-z0-9_]`` and drop empties.

    Fragments may start with a digit or underscore; only final composites
    are gated by :func:`handle_ok`.
    """
    out: set[str] = set()
    for t in tokens:
        norm = _DISALLOWED.sub("", t.lower())
        if norm:
            out.add(norm)
    return out


def adjacent_combinations(handle: str) -> set[str]:
    frags = _fragments(handle)
    out: set[str] = set()
    for a, b in zip(frags, frags[1:]):
        out.add(f"{a}_{b}")
        out.add(f"{a}{b}")
    return out


def pairwise_combinations(vocab: Iterable[str]) -> set[str]:
    words = sorted(set(vocab))
    out: set[str] = set()
    for a in words:
        for b in words:
            if a != b:
                out.add(f"{a}_{b}")
                out.add(f"{a}{b}")
    return out


def sample_higher_order(vocab: Iterable[str], k: int, seed: int) -> set[str]:
    """Up to ``k`` seeded compositions of three distinct fragments.

    Each junction is independently ``"_"`` or ``""``. Returns fewer than ``k``
    strings only when the vocabulary cannot supply ``k`` distinct ones.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    words = sorted(set(vocab))
    if k == 0 or len(words) < HIGHER_ORDER_ARITY:
        return set()
    n = len(words)
    possible = n * (n - 1) * (n - 2) * 2 ** (HIGHER_ORDER_ARITY - 1)
    target = min(k, possible)
    rng = random.Random(f"higher-order:{seed}")
    out: set[str] = set()
    attempts = 0
    while len(out) < target and attempts < 50 * target:
        attempts += 1
        parts = rng.sample(words, HIGHER_ORDER_ARITY)
        text = parts[0]
        for p in parts[1:]:
            text += rng.choice(("_", "")) + p
        out.add(text)
    return out


def generate_candidates(
    lexicon: Iterable[str],
    handles: Iterable[str] = (),
    k_higher: int = 0,
    seed: int = 0,
) -> CandidateSet:
    lexicon = list(lexicon)
    if not lexicon:
        raise EmptyLexicon("seed lexicon has no terms")
    handles = sorted(set(handles))
    vocab = valid_fragments(set(lexicon) | split_handles(handles))

    pool = set(vocab)
    for h in handles:
        pool |= adjacent_combinations(h)
    pool |= pairwise_combinations(vocab)
    pool |= sample_higher_order(vocab, k_higher, seed)

    accepted = sorted(c for c in pool if handle_ok(c))
    random.Random(f"shuffle:{seed}").shuffle(accepted)
    return CandidateSet(tuple(accepted), seed)


def candidate_bound(lexicon: Iterable[str], handles: Iterable[str], k_higher: int) -> int:
    """Upper bound on the candidate count for the given inputs."""
    handles = set(handles)
    vocab = valid_fragments(set(lexicon) | split_handles(handles))
    w = len(vocab)
    adjacent = sum(max(len(_fragments(h)) - 1, 0) for h in handles)
    return w + 2 * adjacent + 2 * w * (w - 1) + k_higher


def read_terms(path: str | Path) -> list[str]:
    """Read one term per line, skipping blanks and ``#`` comments."""
    terms = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            terms.append(line)
    return terms
