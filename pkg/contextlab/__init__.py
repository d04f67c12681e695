# ContextLab - exact contextuality deciders, consistification and principle checks
__version__ = "1.0.0"
