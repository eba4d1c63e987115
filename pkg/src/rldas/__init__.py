"""Dynamic algorithm selection over a pool of warm-startable DE variants."""
__version__ = "0.1.0"
