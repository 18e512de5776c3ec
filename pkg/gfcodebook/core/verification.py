"""
Verification reports shared by the field, character and analysis checks.
"""

from dataclasses import dataclass, field


@dataclass
class VerificationReport:
    """Outcome of an exhaustive identity check.

    Attributes:
        name: Suite or identity name.
        passed: True when no counterexample was found.
        checked: Number of individual comparisons performed.
        counterexample: First failing case, if any.
        details: Free-form extra facts (case counts, magnitudes...).
    """
    name: str
    passed: bool = True
    checked: int = 0
    counterexample: dict = None
    details: dict = field(default_factory=dict)

    def record(self, ok, **case):
        """Count one comparison; keep the first failing case."""
        self.checked += 1
        if not ok and self.passed:
            self.passed = False
            self.counterexample = case
        return ok

    def record_many(self, ok_mask, case_builder):
        """Count a vector of comparisons.

        Args:
            ok_mask: Boolean numpy array, one entry per comparison.
            case_builder: Called with the index of the first failure to
                describe the counterexample.
        """
        ok_mask = ok_mask.ravel()
        self.checked += int(ok_mask.size)
        if self.passed and not ok_mask.all():
            self.passed = False
            first = int((~ok_mask).argmax())
            self.counterexample = case_builder(first)
        return bool(ok_mask.all())

    def merge(self, other):
        """Fold another report into this one (used by the 'all' suite)."""
        self.checked += other.checked
        if self.passed and not other.passed:
            self.passed = False
            self.counterexample = dict(other.counterexample or {}, suite=other.name)
        self.details[other.name] = other.details
        return self

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "counterexample": self.counterexample,
            "details": self.details,
        }
