"""Exception hierarchy shared by all cmtower modules.

The distinction between the three classes matters for scripting: the CLI
maps them to distinct exit codes (validation 2, precision 3, invariant 4).
"""


class CmtowerError(Exception):
    """Base class for all cmtower errors."""


class ValidationError(CmtowerError):
    """Bad or inconsistent input (wrong prime, mismatched precision, ...)."""


class PrecisionError(CmtowerError):
    """A result is indistinguishable from zero (or otherwise undecidable)
    at the working precision.  Carries no mathematical content: rerun at
    higher precision."""


class InvariantError(CmtowerError):
    """A mathematical invariant that should hold for valid inputs was
    falsified.  Either the input is outside the theory's hypotheses or
    there is a bug; never absorbed silently."""


class HenselError(CmtowerError):
    """The Hensel hypothesis failed: no certified root.  Callers treat
    this as evidence of a non-split step, never as a proof."""
