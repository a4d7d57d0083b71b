"""libotda: optimal transport tools for unsupervised domain adaptation"""

__version__ = "1.0a1"
