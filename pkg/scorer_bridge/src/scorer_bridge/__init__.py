"""Scoring bridge: turns annotated corpora into per-token score files.

Sits between a corpus toolkit and its span decoder: reads the corpus JSONL
interchange format, substitutes the [target] token, tokenizes, runs either
a deterministic mock or a small trainable encoder with start/end heads,
and writes the decoder's score JSONL format.
"""

__version__ = "0.1.0"
