# Copyright 2026 The qqmatch Authors
# SPDX-License-Identifier: Apache-2.0
"""Question-to-question matching engine."""

import json
import os

from . import _qqmatch
from ._qqmatch import (ContractError, DomainError, Error, FormatError,
                       ResourceError, basic_clean, edit_distance,
                       norm_levenshtein)

__all__ = [
    "ContractError", "DomainError", "Engine", "Error", "FormatError",
    "ResourceError", "Resources", "basic_clean", "build_index",
    "edit_distance", "norm_levenshtein",
]


def build_index(config, out=None):
    """Builds the index for the config's corpus; returns the entry count."""
    return _qqmatch.build_index(os.fspath(config), os.fspath(out or ""))


class Resources:
    """Scorer inputs loaded from an engine config, without an index."""

    def __init__(self, config):
        self._r = _qqmatch.Resources(os.fspath(config))

    def preprocess(self, text):
        return json.loads(self._r.preprocess_json(text))

    def fuzzy(self, question1, question2):
        return json.loads(self._r.fuzzy_json(question1, question2))

    def fuzzy_tokens(self, tokens1, tokens2):
        return json.loads(self._r.fuzzy_tokens_json(set(tokens1), set(tokens2)))


class Engine:
    """An opened index plus models. Responses match the HTTP bodies."""

    def __init__(self, config):
        self._e = _qqmatch.Engine(os.fspath(config))

    @property
    def corpus_size(self):
        return self._e.corpus_size

    def match(self, query, top_k=5):
        return json.loads(self._e.match_json(query, top_k))

    def match_text(self, query, top_k=5):
        return self._e.match_json(query, top_k)

    def score_pair(self, question1, question2):
        return json.loads(self._e.score_json(question1, question2))

    def health(self):
        return json.loads(self._e.health_json())
