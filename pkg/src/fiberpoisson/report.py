"""Structured pass/fail records for verified identities."""


class InternalInvariantError(RuntimeError):
    """A derived object violated an invariant the construction guarantees."""


def summarize_residual(obj, limit=100):
    """Short text for a residual series / multivector / form."""
    if obj is None:
        return "0"
    if hasattr(obj, "is_zero") and obj.is_zero():
        return "0"
    if hasattr(obj, "render"):
        text = obj.render()
        return text if len(text) <= limit else text[:limit] + " ..."
    return str(obj)


class CheckEntry:
    """
    One verified identity: name, stable tag, the fiber order at which the
    residual is certified, pass/fail, and a residual summary.

    ``required=False`` marks informational entries that do not affect the
    overall verdict.
    """

    def __init__(self, name, tag, certified_order, passed, residual="0",
                 required=True, detail=None):
        self.name = name
        self.tag = tag
        self.certified_order = certified_order
        self.passed = bool(passed)
        self.residual = residual
        self.required = required
        self.detail = detail

    def to_dict(self):
        d = {
            "name": self.name,
            "tag": self.tag,
            "certified_order": self.certified_order,
            "passed": self.passed,
            "residual": self.residual,
            "required": self.required,
        }
        if self.detail is not None:
            d["detail"] = self.detail
        return d

    def render(self):
        mark = "PASS" if self.passed else "FAIL"
        if not self.required:
            mark = "info"
        line = "  [%s] %-34s tag=%s order=%s" % (mark, self.name, self.tag,
                                                 self.certified_order)
        if not self.passed or self.residual != "0":
            line += "  residual: %s" % self.residual
        return line


class CheckReport:
    def __init__(self, title, entries=None):
        self.title = title
        self.entries = list(entries) if entries else []

    def add(self, *args, **kwargs):
        entry = args[0] if args and isinstance(args[0], CheckEntry) else CheckEntry(*args, **kwargs)
        self.entries.append(entry)
        return entry

    def extend(self, other):
        self.entries.extend(other.entries)

    @property
    def passed(self):
        return all(e.passed for e in self.entries if e.required)

    def certified_order(self):
        orders = [e.certified_order for e in self.entries
                  if e.required and e.certified_order is not None]
        return min(orders) if orders else None

    def to_dict(self):
        return {
            "title": self.title,
            "passed": self.passed,
            "entries": [e.to_dict() for e in self.entries],
        }

    def render(self):
        lines = ["%s: %s" % (self.title, "PASS" if self.passed else "FAIL")]
        lines.extend(e.render() for e in self.entries)
        return "\n".join(lines)

    def __repr__(self):
        return "<CheckReport %s %s>" % (self.title, "PASS" if self.passed else "FAIL")
