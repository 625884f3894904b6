"""Check reports: human-readable text and ``key=value`` records."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Violation:
    law: str
    witness: dict[str, str]
    detail: str = ""

    def text(self) -> str:
        wit = ", ".join(f"{k}={v}" for k, v in self.witness.items())
        return f"{self.law}: {self.detail} [{wit}]" if self.detail else f"{self.law}: [{wit}]"


@dataclass
class Report:
    check: str
    instance: str
    samples: int = 0
    violations: list[Violation] = field(default_factory=list)
    indeterminate: int = 0
    seed: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, law: str, witness: dict, detail: str = "") -> None:
        self.violations.append(Violation(law, {k: str(v) for k, v in witness.items()}, detail))

    def merge(self, other: Report) -> Report:
        self.samples += other.samples
        self.violations.extend(other.violations)
        self.indeterminate += other.indeterminate
        self.notes.extend(other.notes)
        return self

    def text(self, limit: int = 20) -> str:
        status = "PASS" if self.ok else "FAIL"
        head = (f"{status} {self.check} on {self.instance}: {self.samples} samples, "
                f"{len(self.violations)} violations")
        if self.indeterminate:
            head += f", {self.indeterminate} indeterminate"
        if self.seed is not None:
            head += f" (seed {self.seed})"
        lines = [head]
        lines += [f"  {n}" for n in self.notes]
        lines += [f"  violation {v.text()}" for v in self.violations[:limit]]
        if len(self.violations) > limit:
            lines.append(f"  ... {len(self.violations) - limit} more")
        return "\n".join(lines)

    def records(self) -> str:
        lines = [f"check={self.check} instance={_q(self.instance)} samples={self.samples} "
                 f"violations={len(self.violations)} indeterminate={self.indeterminate} "
                 f"seed={self.seed if self.seed is not None else '-'} "
                 f"status={'pass' if self.ok else 'fail'}"]
        for v in self.violations:
            wit = " ".join(f"w.{k}={_q(x)}" for k, x in v.witness.items())
            lines.append(f"violation check={self.check} law={_q(v.law)} {wit}".rstrip())
        return "\n".join(lines)


def _q(s: str) -> str:
    s = str(s)
    if not s or any(c in s for c in ' ="'):
        return '"' + s.replace('"', '\\"') + '"'
    return s
