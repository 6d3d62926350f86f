"""
BS(1,q) Toolkit Exceptions.
"""


class BSToolkitError(Exception):
    """Base exception for toolkit errors."""

    def __init__(self, message: str, detail: str = None):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def __str__(self):
        return self.message


class InvalidArgumentError(BSToolkitError):
    """Argument outside its documented range (q < 2, k < 1, d = 0, ...)."""
    pass


class ParseError(BSToolkitError):
    """Base class for text format errors."""

    def __init__(self, message: str, line: int = None, detail: str = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, detail)
        self.line = line


class GeneratorWordError(ParseError):
    """Unknown token in a generator word."""
    pass


class PeFormatError(ParseError):
    """Malformed pointed expansion (digit range, marker count, lexical error)."""
    pass


class AutomatonFormatError(ParseError):
    """Malformed automaton, DFA or PE-set file."""
    pass


class FormulaError(ParseError):
    """Malformed succinct automaton or propositional formula."""
    pass


class ContextMismatchError(BSToolkitError):
    """Operands built for different bases q."""
    pass


class AlphabetMismatchError(BSToolkitError):
    """Automata over different alphabets."""
    pass


class NotAPathError(BSToolkitError):
    """Edge sequence is not a path of the automaton."""
    pass


class EmptyCycleSet(BSToolkitError):
    """No nonzero returning-left cycle exists, so the cycle star is {0}."""

    def __init__(self, message: str, state: str = None, **kwargs):
        super().__init__(message, **kwargs)
        self.state = state


class BudgetExceeded(BSToolkitError):
    """A configured computational budget would be exceeded."""

    def __init__(self, message: str, gcd: int = None, bound: int = None, **kwargs):
        super().__init__(message, **kwargs)
        self.gcd = gcd
        self.bound = bound


class StateLimitExceeded(BudgetExceeded):
    """Lazily explored automaton grew past BS_STATE_LIMIT."""
    pass


class ExpansionLimitExceeded(BudgetExceeded):
    """Succinct automaton too large to expand."""
    pass
