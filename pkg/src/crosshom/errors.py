"""Exception hierarchy."""
from __future__ import annotations


class CrosshomError(Exception):
    pass


class GroupAxiomError(CrosshomError):
    """A Cayley table violates a group axiom.

    ``axiom`` is one of ``closure``, ``identity``, ``inverse``,
    ``associativity``; ``witness`` holds the offending indices.
    """

    def __init__(self, axiom: str, witness: tuple[int, ...], label: str = ""):
        self.axiom = axiom
        self.witness = tuple(int(w) for w in witness)
        where = f" in {label}" if label else ""
        super().__init__(f"{axiom} axiom fails{where} at {self.witness}")


class OrderBoundError(CrosshomError):
    pass


class SpecError(CrosshomError):
    """Malformed group spec, label, or catalog stanza."""


class BudgetExceeded(CrosshomError):
    pass


class NotNormalError(CrosshomError):
    pass


class ConstraintError(CrosshomError):
    """A section constraint whose quotient part is not a homomorphism."""


class HypothesisViolation(CrosshomError):
    """A checker's precondition does not hold; ``name`` says which one."""

    def __init__(self, name: str, detail: str = ""):
        self.name = name
        super().__init__(f"{name}: {detail}" if detail else name)


class InducedActionError(CrosshomError):
    """The action of M on a phi-core is not well defined (an internal bug)."""
