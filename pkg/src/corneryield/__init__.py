"""Multi-corner yield analysis toolkit.

Synthetic circuit benchmarks with exact golden yields, an in-context
transformer surrogate meta-trained on synthetic function priors, sparse
feature selection, uncertainty-guided active sampling, and a pipeline that
ties them together into per-corner yield estimates.
"""

__version__ = "0.1.0"
