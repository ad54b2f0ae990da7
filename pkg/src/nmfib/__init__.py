"""nmfib: a workbench for combining matrix-defined propositional logics.

Finite (non-deterministic) matrices, Hilbert calculi, strict products and
powers, Boolean-clone analysis, and machine-checkable recovery certificates
for merged two-valued fragments.
"""

__version__ = "0.1.0"
