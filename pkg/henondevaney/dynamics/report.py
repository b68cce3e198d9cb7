"""
CheckResult is the unit every verification routine returns: a named pass/fail
with a free-form details dict (counts, witnesses, observed trends).
"""


class CheckResult(object):
    def __init__(
        self,
        name,  # type: str
        passed,  # type: bool
        details=None,  # type: Optional[Dict[str, Any]]
        informational=False,  # type: bool
    ):
        self.name = name
        self.passed = bool(passed)
        self.details = details if details is not None else {}
        # Informational entries never fail a suite.
        self.informational = informational

    def __bool__(self):
        return self.passed

    def __repr__(self):
        return 'CheckResult(%r, passed=%r)' % (self.name, self.passed)

    def to_dict(self):
        return {
            'name': self.name,
            'passed': self.passed,
            'informational': self.informational,
            'details': self.details,
        }
