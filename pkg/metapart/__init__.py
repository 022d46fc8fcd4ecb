"""
metapart
Quality-proportional partition sampling and representative-partition selection
"""
__version__ = "1.0.0"
