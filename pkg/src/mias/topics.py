"""Latent topic model over plot synopses: collapsed Gibbs LDA, deterministic by seed."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1

DEFAULT_NUM_TOPICS = 30
DEFAULT_BETA = 0.01
DEFAULT_ITERATIONS = 1000
DEFAULT_MIN_TOKEN_COUNT = 2


class TopicModelError(Exception):
    pass


def default_alpha(num_topics: int) -> float:
    return 50.0 / num_topics


def doc_seed(base_seed: int, tokens: list[str]) -> int:
    """Stable per-document seed so inference is order-independent."""
    h = hashlib.sha256()
    h.update(str(base_seed).encode())
    for t in tokens:
        h.update(b"\x00")
        h.update(t.encode())
    return int.from_bytes(h.digest()[:8], "little")


@dataclass
class TopicModel:
    num_topics: int
    alpha: float
    beta: float
    vocabulary: list[str]
    topic_word_counts: np.ndarray  # [num_topics, vocab], int64
    topic_totals: np.ndarray  # [num_topics], int64
    rng_seed: int

    @property
    def vocab_index(self) -> dict[str, int]:
        if not hasattr(self, "_vocab_index"):
            self._vocab_index = {w: i for i, w in enumerate(self.vocabulary)}
        return self._vocab_index

    def phi(self) -> np.ndarray:
        """Smoothed topic-word distributions, rows summing to 1."""
        v = len(self.vocabulary)
        return (self.topic_word_counts + self.beta) / (
            self.topic_totals[:, None] + v * self.beta
        )

    def top_keywords(self, k: int, n: int) -> list[tuple[str, float]]:
        """Top-n tokens of topic k by smoothed probability; ties lexicographic."""
        if not 0 <= k < self.num_topics:
            raise TopicModelError(f"topic index {k} out of range")
        row = self.phi()[k]
        order = sorted(range(len(row)), key=lambda w: (-row[w], self.vocabulary[w]))
        return [(self.vocabulary[w], float(row[w])) for w in order[:n]]

    def save(self, path: str | Path) -> None:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "num_topics": self.num_topics,
            "alpha": self.alpha,
            "beta": self.beta,
            "rng_seed": self.rng_seed,
            "vocabulary": self.vocabulary,
            "topic_word_counts": self.topic_word_counts.tolist(),
        }
        Path(path).write_text(json.dumps(payload, sort_keys=True), "utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "TopicModel":
        payload = json.loads(Path(path).read_text("utf-8"))
        if payload.get("schema_version") != SCHEMA_VERSION:
            raise TopicModelError("unsupported topic model schema version")
        counts = np.array(payload["topic_word_counts"], dtype=np.int64)
        return cls(
            num_topics=payload["num_topics"],
            alpha=payload["alpha"],
            beta=payload["beta"],
            vocabulary=payload["vocabulary"],
            topic_word_counts=counts,
            topic_totals=counts.sum(axis=1),
            rng_seed=payload["rng_seed"],
        )


def _compiled_sweep():
    from ._lda import gibbs_sweep

    return gibbs_sweep


def _build_vocabulary(docs: list[list[str]], min_count: int) -> list[str]:
    counts: dict[str, int] = {}
    for doc in docs:
        for t in doc:
            counts[t] = counts.get(t, 0) + 1
    return sorted(t for t, c in counts.items() if c >= min_count)


def reference_sweep(
    tokens: np.ndarray,
    doc_ids: np.ndarray,
    zs: np.ndarray,
    nkw: np.ndarray,
    nk: np.ndarray,
    ndk: np.ndarray,
    alpha: float,
    beta: float,
    vbeta: float,
    uniforms: np.ndarray,
) -> None:
    """Pure-Python Gibbs sweep; the compiled kernel must match it bit for bit."""
    for i in range(len(tokens)):
        w = tokens[i]
        d = doc_ids[i]
        z = zs[i]
        nkw[z, w] -= 1
        nk[z] -= 1
        ndk[d, z] -= 1
        p = (nkw[:, w] + beta) * (ndk[d] + alpha) / (nk + vbeta)
        cum = np.cumsum(p)
        z = int(np.searchsorted(cum, uniforms[i] * cum[-1], side="right"))
        if z >= len(nk):  # guard against fp edge at the top of the cumsum
            z = len(nk) - 1
        zs[i] = z
        nkw[z, w] += 1
        nk[z] += 1
        ndk[d, z] += 1


def fit(
    docs: list[list[str]],
    num_topics: int = DEFAULT_NUM_TOPICS,
    alpha: float | None = None,
    beta: float = DEFAULT_BETA,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
    min_token_count: int = DEFAULT_MIN_TOKEN_COUNT,
    compiled: bool = True,
) -> tuple[TopicModel, np.ndarray]:
    """Fit by collapsed Gibbs sampling; returns (model, per-document theta).

    Theta rows are taken from the final sweep's counts with Dirichlet smoothing.
    Documents reduced to zero in-vocabulary tokens get the uniform prior.
    """
    if num_topics < 2:
        raise TopicModelError("num_topics must be >= 2")
    if alpha is None:
        alpha = default_alpha(num_topics)
    vocab = _build_vocabulary(docs, min_token_count)
    if not vocab or all(not d for d in docs):
        raise TopicModelError("corpus has no usable tokens")
    if len(vocab) < num_topics:
        raise TopicModelError(
            f"vocabulary size {len(vocab)} below num_topics {num_topics}"
        )
    index = {w: i for i, w in enumerate(vocab)}
    docs_w = [
        np.array([index[t] for t in doc if t in index], dtype=np.int64) for doc in docs
    ]

    rng = np.random.default_rng(seed)
    k, v = num_topics, len(vocab)
    nkw = np.zeros((k, v), dtype=np.int64)
    nk = np.zeros(k, dtype=np.int64)
    ndk = np.zeros((len(docs), k), dtype=np.int64)
    docs_z = []
    for d, words in enumerate(docs_w):
        zs = rng.integers(0, k, size=len(words))
        for w, z in zip(words, zs):
            nkw[z, w] += 1
            nk[z] += 1
            ndk[d, z] += 1
        docs_z.append(zs)

    tokens = np.concatenate(docs_w) if docs_w else np.zeros(0, dtype=np.int64)
    doc_ids = np.concatenate(
        [np.full(len(w), d, dtype=np.int64) for d, w in enumerate(docs_w)]
    ) if docs_w else np.zeros(0, dtype=np.int64)
    zs_flat = np.concatenate(docs_z).astype(np.int64)

    vbeta = v * beta
    sweep = _compiled_sweep() if compiled else reference_sweep
    for _ in range(iterations):
        uniforms = rng.random(len(tokens))
        sweep(tokens, doc_ids, zs_flat, nkw, nk, ndk, alpha, beta, vbeta, uniforms)

    model = TopicModel(
        num_topics=k,
        alpha=alpha,
        beta=beta,
        vocabulary=vocab,
        topic_word_counts=nkw,
        topic_totals=nk,
        rng_seed=seed,
    )
    theta = (ndk + alpha) / (ndk.sum(axis=1, keepdims=True) + k * alpha)
    return model, theta


DEFAULT_INFER_ITERATIONS = 50


def infer(
    model: TopicModel,
    doc: list[str],
    iterations: int = DEFAULT_INFER_ITERATIONS,
    seed: int = 0,
    compiled: bool = True,
) -> np.ndarray:
    """Topic distribution for one document, topic-word counts held fixed.

    Unseen tokens are skipped; an empty or all-unseen document gets the uniform
    prior. Pure given (model, doc, iterations, seed).
    """
    index = model.vocab_index
    words = np.array([index[t] for t in doc if t in index], dtype=np.int64)
    k = model.num_topics
    if len(words) == 0:
        return np.full(k, 1.0 / k)

    rng = np.random.default_rng(seed)
    alpha, beta = model.alpha, model.beta
    vbeta = len(model.vocabulary) * beta
    nd = np.zeros(k, dtype=np.int64)
    zs = rng.integers(0, k, size=len(words))
    for z in zs:
        nd[z] += 1
    nkw = model.topic_word_counts
    nk = model.topic_totals
    if compiled:
        from ._lda import infer_sweep

        zs = zs.astype(np.int64)
        for _ in range(iterations):
            uniforms = rng.random(len(words))
            infer_sweep(words, zs, nd, nkw, nk, alpha, beta, vbeta, uniforms)
        return (nd + alpha) / (nd.sum() + k * alpha)
    for _ in range(iterations):
        uniforms = rng.random(len(words))
        for i in range(len(words)):
            w = words[i]
            nd[zs[i]] -= 1
            p = (nkw[:, w] + beta) * (nd + alpha) / (nk + vbeta)
            cum = np.cumsum(p)
            z = int(np.searchsorted(cum, uniforms[i] * cum[-1], side="right"))
            if z >= k:
                z = k - 1
            zs[i] = z
            nd[z] += 1
    return (nd + alpha) / (nd.sum() + k * alpha)
