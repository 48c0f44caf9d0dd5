"""
Results management module.
"""

from .manager import ResultsManager, to_jsonable

__all__ = ['ResultsManager', 'to_jsonable']
