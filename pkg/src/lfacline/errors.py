"""Typed errors raised by the analysis routines."""


class LfaclineError(Exception):
    """Base class for all package errors."""


class DivisionByZeroAdmittance(LfaclineError):
    """Characteristic impedance is undefined: shunt admittance G' + jwC' is zero.

    Happens at exactly 0 Hz for a line with no shunt conductance.
    """


class SingularSystem(LfaclineError):
    """A terminal-condition system has no unique solution."""


class ZeroResistanceAtDc(LfaclineError):
    """Series conductance 1/R is unbounded at 0 Hz for a zero-resistance branch."""


class InductiveShuntAtDc(LfaclineError):
    """An inductive bus shunt degenerates to a short at 0 Hz."""


class FrequencyMismatch(LfaclineError):
    """Operands were evaluated at different frequencies."""


class Infeasible(LfaclineError):
    """No operating point satisfies all constraints."""


class EmptyRegion(LfaclineError):
    """No sample of the operating box is feasible."""


class ConfigError(LfaclineError):
    """Study configuration is malformed; message names the offending field."""
