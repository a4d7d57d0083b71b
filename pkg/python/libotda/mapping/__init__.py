"""libotda.mapping: barycentric transport of samples"""
from ._barycentric import barycentric_map
