"""Corpus toolkit for variable-definition extraction research.

Augments training corpora from template sentences and harvested
variable-definition pairs, manages reproducible dataset splits, decodes
definition spans from model score files, evaluates predictions with a
seven-class taxonomy and four metrics, and measures dataset similarity
by definition-vocabulary overlap.
"""

__version__ = "0.1.0"
