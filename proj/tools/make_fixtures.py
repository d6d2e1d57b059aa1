#!/usr/bin/env python3
# Copyright 2026 The qqmatch Authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerates the committed test fixtures under tests/fixtures.

Run from the repository root:  python3 tools/make_fixtures.py
Output is deterministic for a given numpy version.
"""

import json
import re
import struct
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "fixtures"
NORM = ROOT / "data" / "normalization"

CORPUS = [
    ("q01", "How do I open a brokerage account?", "Use the online application and verify your identity."),
    ("q02", "How can I close my account?", "Call support or submit the closure form."),
    ("q03", "What is an individual retirement account?", "A tax-advantaged account for retirement savings."),
    ("q04", "How do I transfer money between accounts?", "Use the transfers page to move funds."),
    ("q05", "When will my deposit be available?", "Deposits clear in one to three business days."),
    ("q06", "How do I reset my password?", "Choose forgot password on the login page."),
    ("q07", "What are fees or charges for fractional trading?", "Fractional orders carry no extra commission."),
    ("q08", "Can I buy fractional shares of stocks?", "Yes, most listed stocks support fractional orders."),
    ("q09", "How are dividends paid?", "Dividends are credited as cash unless reinvested."),
    ("q10", "What is power of attorney?", "A legal document letting someone act for you."),
    ("q11", "How do I add a beneficiary?", "Open the beneficiaries section in settings."),
    ("q12", "Where can I find my tax documents?", "Tax forms appear under statements each February."),
    ("q13", "How long does a wire transfer take?", "Domestic wires usually arrive the same day."),
    ("q14", "What is margin trading?", "Borrowing against your holdings to buy securities."),
    ("q15", "How do I enable two factor authentication?", "Turn it on under security settings."),
    ("q16", "What happens if my order is rejected?", "You receive an alert with the rejection reason."),
    ("q17", "Can I change my mailing address online?", "Yes, update it in your profile."),
    ("q18", "How do I roll over a 401(k)?", "Request a direct rollover from your plan administrator."),
    ("q19", "What is the minimum balance required?", "There is no minimum balance for standard accounts."),
    ("q20", "How do I sell my mutual funds?", "Place a sell order from the positions page."),
    ("q21", "Why was my withdrawal delayed?", "Withdrawals may be held for a security review."),
    ("q22", "How do I download monthly statements?", "Statements are available as PDF downloads."),
    ("q23", "Is there a mobile app?", "Yes, for both iOS and Android."),
    ("q24", "How do I report a lost debit card?", "Lock the card in the app and call support."),
    ("q25", "What interest rate do savings earn?", "The current rate is shown on the rates page."),
]

SCENARIO_QUERY = "What is cost for factnol trading?"
SCENARIO_TARGET = "q07"
DISJOINT_QUERY = "zebra quantum xylophone"

# Groups of words pulled towards a shared direction in the embedding table.
CLUSTERS = [
    ["cost", "costs", "fees", "fee", "charges", "charge", "price", "commission", "commissions"],
    ["is", "are", "was", "were", "be"],
    ["account", "accounts", "brokerage"],
    ["transfer", "transfers", "wire", "wires", "move"],
    ["deposit", "deposits", "withdrawal", "withdrawals", "money", "cash"],
    ["buy", "sell", "order", "orders", "trading", "trade"],
    ["stock", "stocks", "share", "shares", "fund", "funds", "securities"],
    ["tax", "taxes", "documents", "statements", "statement"],
]

EMBED_DIM = 32
SIAMESE = dict(embed_dim=8, hidden_dim=6, seq_len=16)
THRESHOLD1 = 0.6
THRESHOLD2 = 0.55


def basic_clean(text):
    return " ".join(re.sub(r"[^0-9a-z]+", " ", text.lower()).split())


def load_norm_tables():
    def lexicon(name):
        words = set()
        for line in (NORM / name).read_text().splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                words.add(line)
        return words

    def exceptions(name):
        table = {}
        for line in (NORM / name).read_text().splitlines():
            if line.strip() and not line.startswith("#"):
                a, b = line.split("\t")
                table[a.strip()] = b.strip()
        return table

    return (lexicon("verb_lexicon.txt"), lexicon("noun_lexicon.txt"),
            exceptions("verb_exceptions.tsv"), exceptions("noun_exceptions.tsv"))


def base_forms(tokens):
    """Approximate lemma/singular forms so the normalized variant has vocabulary."""
    verbs, nouns, verb_exc, noun_exc = load_norm_tables()
    out = set()
    for t in tokens:
        for table in (verb_exc, noun_exc):
            if t in table:
                out.add(table[t])
        if t in verbs or t in nouns:
            for suffix, repl in (("ies", "y"), ("ing", ""), ("ed", ""), ("es", ""), ("s", "")):
                if t.endswith(suffix) and len(t) - len(suffix) >= 2:
                    out.add(t[: len(t) - len(suffix)] + repl)
    return out


def edit_distance(a, b):
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def fuzzy_oracle(q1, q2, table):
    """Line-by-line transcription of the fuzzy intersection ratio."""
    s1, s2 = set(q1.split()), set(q2.split())
    overlap = s1 & s2
    if not overlap:
        return 0.0
    ex1, ex2 = sorted(s1 - s2), sorted(s2 - s1)
    rem1, rem2 = set(), set()
    partial = 0.0
    for w1 in ex1:
        for w2 in ex2:
            syn = 1.0 - edit_distance(w1, w2) / max(len(w1), len(w2))
            if syn >= THRESHOLD1:
                partial += syn
                rem1.add(w1)
                rem2.add(w2)
                break
            if w1 in table and w2 in table:
                a, b = table[w1], table[w2]
                c = float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))
                sem = (max(-1.0, min(1.0, c)) + 1.0) / 2.0
                if sem >= THRESHOLD2:
                    partial += sem
                    rem1.add(w1)
                    rem2.add(w2)
                    break
    l0 = len(overlap)
    l1 = len(rem1)
    l2 = len(ex1) - l1
    l3 = len(set(ex2) - rem2)
    return (l0 + partial) / (l0 + l1 + l2 + l3)


def corpus_tokens():
    tokens = set()
    for _, q, _ in CORPUS:
        tokens.update(basic_clean(q).split())
    # the product stage rewrites "401 k" to "401k"
    tokens.add("401k")
    tokens.update(basic_clean(SCENARIO_QUERY).split())
    return tokens


def make_embeddings(rng, vocab):
    vectors = {}
    centers = {}
    for group in CLUSTERS:
        center = rng.normal(size=EMBED_DIM)
        for w in group:
            centers[w] = center
    for w in sorted(vocab):
        noise = rng.normal(size=EMBED_DIM)
        if w in centers:
            v = centers[w] + 0.35 * noise
        else:
            v = noise
        vectors[w] = v
    vectors.pop("factnol", None)  # the misspelling stays out of vocabulary
    return vectors


def write_embeddings(path, vectors):
    lines = [f"{len(vectors)} {EMBED_DIM}"]
    for w in sorted(vectors):
        lines.append(w + " " + " ".join(f"{x:.6f}" for x in vectors[w]))
    path.write_text("\n".join(lines) + "\n")
    # reload the rounded values so the oracle sees exactly what the engine loads
    return {w: np.array([float(f"{x:.6f}") for x in v]) for w, v in vectors.items()}


def write_siamese(rng, tokens, weights_path, index_path):
    V = len(tokens) + 1
    d_e, d_h, L = SIAMESE["embed_dim"], SIAMESE["hidden_dim"], SIAMESE["seq_len"]
    emb = rng.normal(scale=0.6, size=(V, d_e)).astype(np.float32)
    emb[0] = 0.0
    W = rng.normal(scale=0.5, size=(d_e, 4 * d_h)).astype(np.float32)
    R = rng.normal(scale=0.4, size=(d_h, 4 * d_h)).astype(np.float32)
    b = rng.normal(scale=0.1, size=(4 * d_h,)).astype(np.float32)
    with open(weights_path, "wb") as f:
        f.write(b"SLW1")
        f.write(struct.pack("<4I", V, d_e, d_h, L))
        for arr in (emb, W, R, b):
            f.write(arr.astype("<f4").tobytes(order="C"))
    index_path.write_text("".join(t + "\n" for t in tokens))


def write_meta_model(path):
    model = {
        "mode": "M1",
        "C": 0.2,
        "degree": 2,
        "gamma": 1.0,
        "coef0": 1.0,
        "bias": -0.3,
        "platt_A": -10.0,
        "platt_B": 0.0,
        "threshold": 0.7,
        "support_vectors": [[0.25, 0.25, 0.25, 0.25], [0.0, 0.0, 0.0, 0.0]],
        "dual_coefs": [0.2, -0.2],
        "feature_order": ["unnormalized_score", "normalized_score", "avg_embedding_score", "fuzzy_score"],
    }
    path.write_text(json.dumps(model, indent=2) + "\n")


def paraphrase(text, rng):
    words = basic_clean(text).split()
    if len(words) > 3:
        del words[int(rng.integers(1, len(words)))]
    return " ".join(words)


def write_pairs(rng, path):
    rows = []
    for _, q, _ in CORPUS[:20]:
        rows.append((paraphrase(q, rng), q, 1))
    for i in range(20):
        a, b = rng.choice(len(CORPUS), size=2, replace=False)
        rows.append((CORPUS[a][1], CORPUS[b][1], 0))
    order = rng.permutation(len(rows))
    path.write_text("".join(f"{rows[i][0]}\t{rows[i][1]}\t{rows[i][2]}\n" for i in order))


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20201210)

    with open(OUT / "corpus.jsonl", "w") as f:
        for qid, q, a in CORPUS:
            f.write(json.dumps({"id": qid, "question": q, "answer": a}) + "\n")

    vocab = corpus_tokens()
    vocab |= base_forms(vocab)
    for group in CLUSTERS:
        vocab.update(group)
    vectors = write_embeddings(OUT / "embeddings.txt", make_embeddings(rng, vocab))

    siamese_tokens = sorted(vocab - {"factnol"})
    write_siamese(rng, siamese_tokens, OUT / "siamese.slw1", OUT / "siamese_tokens.txt")
    write_meta_model(OUT / "meta_m1.json")
    write_pairs(rng, OUT / "pairs.tsv")

    query = basic_clean(SCENARIO_QUERY)
    scores = {qid: fuzzy_oracle(query, basic_clean(q), vectors) for qid, q, _ in CORPUS}
    target = scores[SCENARIO_TARGET]
    rivals = {k: v for k, v in scores.items() if k != SCENARIO_TARGET}
    assert all(v < target for v in rivals.values()), rivals
    assert fuzzy_oracle(basic_clean(DISJOINT_QUERY), query, vectors) == 0.0
    (OUT / "scenario_expected.json").write_text(json.dumps({
        "query": SCENARIO_QUERY,
        "target": SCENARIO_TARGET,
        "scores": {k: round(v, 15) for k, v in sorted(scores.items())},
    }, indent=2) + "\n")

    config = {
        "normalization": {
            "contractions": "../../data/normalization/contractions.json",
            "products": "../../data/normalization/products.json",
            "acronyms": "../../data/normalization/acronyms.json",
            "verb_lexicon": "../../data/normalization/verb_lexicon.txt",
            "noun_lexicon": "../../data/normalization/noun_lexicon.txt",
            "verb_exceptions": "../../data/normalization/verb_exceptions.tsv",
            "noun_exceptions": "../../data/normalization/noun_exceptions.tsv",
            "stop_tokens": "../../data/normalization/stop_tokens.txt",
        },
        "embeddings": "embeddings.txt",
        "siamese": {"unnormalized": {"weights": "siamese.slw1", "token_index": "siamese_tokens.txt"},
                    "dot": "cosine"},
        "corpus": "corpus.jsonl",
        "index": "index.qqix",
        "meta_models": {"M1": "meta_m1.json"},
        "sentence": {"kind": "disabled"},
        "fuzzy": {"threshold1": THRESHOLD1, "threshold2": THRESHOLD2},
        "service": {"host": "127.0.0.1", "port": 0},
        "top_k": 5,
    }
    (OUT / "config.json").write_text(json.dumps(config, indent=2) + "\n")
    print(json.dumps({"target": target, "best_rival": max(rivals.values())}))


if __name__ == "__main__":
    main()
