"""Reader and writer for the toolbox ``.fis`` text format.

Only Mamdani systems with ``trimf``/``gaussmf`` membership functions and
min/max/centroid methods are accepted. Parsing never raises on malformed
text by itself: problems are collected as :class:`ParseIssue` records, and
:func:`parse_fis` raises :class:`FisParseError` carrying them when any is an
error.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources

from .fuzzy_core import (
    AND,
    MF_KINDS,
    OR,
    FisDefinition,
    FuzzyError,
    FuzzyRule,
    FuzzyVariable,
    MembershipFunction,
)

ERROR = "error"
WARNING = "warning"

_SECTION_RE = re.compile(r"^\[([A-Za-z]+)(\d*)\]$")
_KEY_RE = re.compile(r"^([A-Za-z]+\d*)\s*=\s*(.*)$")
_MF_RE = re.compile(r"^'([^']*)'\s*:\s*'([^']*)'\s*,\s*\[([^\]]*)\]$")
_RULE_RE = re.compile(r"^([^,]+),([^(:]+)(?:\(([^)]*)\))?\s*:\s*(\S+)$")

_SYSTEM_KEYS = {
    "Name", "Type", "Version", "NumInputs", "NumOutputs", "NumRules",
    "AndMethod", "OrMethod", "ImpMethod", "AggMethod", "DefuzzMethod",
}
_REQUIRED_METHODS = {
    "AndMethod": "min",
    "OrMethod": "max",
    "ImpMethod": "min",
    "AggMethod": "max",
    "DefuzzMethod": "centroid",
}


@dataclass(frozen=True)
class ParseIssue:
    severity: str
    line: int
    message: str

    def __str__(self):
        where = f"line {self.line}: " if self.line else ""
        return f"{self.severity}: {where}{self.message}"


class FisParseError(ValueError):
    def __init__(self, issues):
        self.issues = list(issues)
        errors = [str(i) for i in self.issues if i.severity == ERROR]
        super().__init__("; ".join(errors) or "invalid FIS")


@dataclass
class Section:
    header: str
    index: int | None
    line: int
    entries: list[tuple[int, str]] = field(default_factory=list)

    @property
    def title(self) -> str:
        return f"{self.header}{self.index or ''}"


@dataclass
class FisDocument:
    sections: list[Section]
    source_lines: list[str]


def read_document(text: str) -> tuple[FisDocument, list[ParseIssue]]:
    """Split ``.fis`` text into sections of non-blank lines."""
    issues = []
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    sections: list[Section] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        m = _SECTION_RE.match(line)
        if m:
            header, idx = m.group(1), m.group(2)
            if header not in ("System", "Input", "Output", "Rules"):
                issues.append(ParseIssue(ERROR, lineno, f"unknown section [{header}{idx}]"))
            elif (header in ("Input", "Output")) != bool(idx):
                issues.append(ParseIssue(ERROR, lineno, f"malformed section header {line}"))
            sections.append(Section(header, int(idx) if idx else None, lineno))
        elif not sections:
            issues.append(ParseIssue(ERROR, lineno, "content before the first section header"))
        else:
            sections[-1].entries.append((lineno, line))
    return FisDocument(sections, lines), issues


def _unquote(value: str) -> str | None:
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] == "'":
        return value[1:-1]
    return None


def _numbers(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


def _parse_int(value: str) -> int | None:
    try:
        return int(value.strip())
    except ValueError:
        return None


def _keyvals(section: Section, issues: list[ParseIssue]) -> dict[str, tuple[int, str]]:
    out = {}
    for lineno, line in section.entries:
        m = _KEY_RE.match(line)
        if not m:
            issues.append(ParseIssue(ERROR, lineno, f"expected key=value in [{section.title}], got {line!r}"))
            continue
        key, value = m.group(1), m.group(2).strip()
        if key in out:
            issues.append(ParseIssue(ERROR, lineno, f"duplicate key {key} in [{section.title}]"))
            continue
        out[key] = (lineno, value)
    return out


def _parse_variable(section: Section, issues: list[ParseIssue]):
    kv = _keyvals(section, issues)
    ok = True
    name = None
    if "Name" in kv:
        name = _unquote(kv["Name"][1])
        if name is None:
            issues.append(ParseIssue(ERROR, kv["Name"][0], "Name must be a quoted string"))
            ok = False
    else:
        issues.append(ParseIssue(ERROR, section.line, f"[{section.title}] is missing Name"))
        ok = False

    rng = None
    if "Range" in kv:
        lineno, value = kv["Range"]
        m = re.fullmatch(r"\[([^\]]*)\]", value)
        try:
            rng = _numbers(m.group(1)) if m else None
        except ValueError:
            rng = None
        if rng is None or len(rng) != 2:
            issues.append(ParseIssue(ERROR, lineno, f"Range must be [lo hi], got {value}"))
            rng, ok = None, False
    else:
        issues.append(ParseIssue(ERROR, section.line, f"[{section.title}] is missing Range"))
        ok = False

    mfs = {}
    for key, (lineno, value) in kv.items():
        if not re.fullmatch(r"MF\d+", key):
            continue
        m = _MF_RE.match(value)
        if not m:
            issues.append(ParseIssue(ERROR, lineno, f"malformed membership function {key}={value}"))
            ok = False
            continue
        mf_name, kind, params = m.groups()
        if kind not in MF_KINDS:
            issues.append(ParseIssue(ERROR, lineno, f"unsupported membership function type '{kind}'"))
            ok = False
            continue
        try:
            mfs[int(key[2:])] = (lineno, MembershipFunction(mf_name, kind, _numbers(params)))
        except ValueError as exc:
            issues.append(ParseIssue(ERROR, lineno, str(exc) or f"non-numeric parameters in {key}"))
            ok = False

    if "NumMFs" in kv:
        lineno, value = kv["NumMFs"]
        declared = _parse_int(value)
        n_lines = sum(1 for k in kv if re.fullmatch(r"MF\d+", k))
        if declared is None:
            issues.append(ParseIssue(ERROR, lineno, f"NumMFs must be an integer, got {value}"))
            ok = False
        elif declared != n_lines:
            issues.append(ParseIssue(
                ERROR, lineno, f"MF count mismatch: NumMFs={declared} but {n_lines} MF lines"))
            ok = False
    else:
        issues.append(ParseIssue(ERROR, section.line, f"[{section.title}] is missing NumMFs"))
        ok = False

    if ok and sorted(mfs) != list(range(1, len(mfs) + 1)):
        issues.append(ParseIssue(ERROR, section.line, f"[{section.title}] MF indices must run 1..{len(mfs)}"))
        ok = False

    for key, (lineno, _) in kv.items():
        if key not in ("Name", "Range", "NumMFs") and not re.fullmatch(r"MF\d+", key):
            issues.append(ParseIssue(WARNING, lineno, f"unknown key {key} in [{section.title}] ignored"))

    if not ok:
        return None
    try:
        var = FuzzyVariable(name, tuple(rng), tuple(mfs[i][1] for i in sorted(mfs)))
    except FuzzyError as exc:
        issues.append(ParseIssue(ERROR, section.line, str(exc)))
        return None
    return var


def _parse_rule(lineno: int, line: str, issues: list[ParseIssue]):
    m = _RULE_RE.match(line)
    if not m:
        issues.append(ParseIssue(ERROR, lineno, f"malformed rule {line!r}"))
        return None
    ante_s, cons_s, weight_s, conn_s = m.groups()
    indices = []
    for part in (ante_s, cons_s):
        toks = part.split()
        vals = []
        for tok in toks:
            try:
                v = float(tok)
            except ValueError:
                issues.append(ParseIssue(ERROR, lineno, f"malformed rule {line!r}"))
                return None
            if v < 0:
                issues.append(ParseIssue(ERROR, lineno, f"unsupported feature: negated (NOT) index {tok}"))
                return None
            if v != int(v):
                issues.append(ParseIssue(ERROR, lineno, f"unsupported feature: hedge index {tok}"))
                return None
            vals.append(int(v))
        if not vals:
            issues.append(ParseIssue(ERROR, lineno, f"malformed rule {line!r}"))
            return None
        indices.append(vals)

    if weight_s is None:
        issues.append(ParseIssue(WARNING, lineno, "rule weight missing, defaulting to 1"))
        weight = 1.0
    else:
        try:
            weight = float(weight_s)
        except ValueError:
            issues.append(ParseIssue(ERROR, lineno, f"non-numeric rule weight {weight_s!r}"))
            return None

    conn = _parse_int(conn_s)
    if conn not in (1, 2):
        issues.append(ParseIssue(ERROR, lineno, f"rule connective must be 1 (AND) or 2 (OR), got {conn_s}"))
        return None
    return FuzzyRule(tuple(indices[0]), tuple(indices[1]), weight, AND if conn == 1 else OR)


def parse_fis_with_issues(text: str) -> tuple[FisDefinition | None, list[ParseIssue]]:
    """Parse ``.fis`` text, returning the definition (or None) and all issues."""
    doc, issues = read_document(text)
    system = [s for s in doc.sections if s.header == "System"]
    inputs = sorted((s for s in doc.sections if s.header == "Input"), key=lambda s: s.index)
    outputs = sorted((s for s in doc.sections if s.header == "Output"), key=lambda s: s.index)
    rules_sec = [s for s in doc.sections if s.header == "Rules"]

    for header, found in (("System", system), ("Rules", rules_sec)):
        if not found:
            issues.append(ParseIssue(ERROR, 1, f"missing [{header}] section"))
        for extra in found[1:]:
            issues.append(ParseIssue(ERROR, extra.line, f"duplicate [{header}] section"))
    for kind, secs in (("Input", inputs), ("Output", outputs)):
        if [s.index for s in secs] != list(range(1, len(secs) + 1)):
            line = secs[0].line if secs else 1
            issues.append(ParseIssue(ERROR, line, f"[{kind}<k>] sections must be numbered 1..{len(secs)}"))

    sysvals = _keyvals(system[0], issues) if system else {}
    for key, (lineno, value) in sysvals.items():
        if key not in _SYSTEM_KEYS:
            issues.append(ParseIssue(WARNING, lineno, f"unknown key {key} in [System] ignored"))
    sys_line = system[0].line if system else 1

    name = "Untitled"
    if "Name" in sysvals:
        name = _unquote(sysvals["Name"][1])
        if name is None:
            issues.append(ParseIssue(ERROR, sysvals["Name"][0], "Name must be a quoted string"))
            name = "Untitled"
    if "Type" in sysvals:
        lineno, value = sysvals["Type"]
        if (_unquote(value) or value).lower() != "mamdani":
            issues.append(ParseIssue(ERROR, lineno, f"only Type='mamdani' is supported, got {value}"))
    elif system:
        issues.append(ParseIssue(ERROR, sys_line, "[System] is missing Type"))
    for key, expected in _REQUIRED_METHODS.items():
        if key in sysvals:
            lineno, value = sysvals[key]
            if _unquote(value) != expected:
                issues.append(ParseIssue(ERROR, lineno, f"unsupported {key} {value}; expected '{expected}'"))
    version = sysvals.get("Version", (0, "2.0"))[1]

    declared = {}
    for key, actual in (("NumInputs", len(inputs)), ("NumOutputs", len(outputs))):
        if key not in sysvals:
            if system:
                issues.append(ParseIssue(ERROR, sys_line, f"[System] is missing {key}"))
            continue
        lineno, value = sysvals[key]
        n = _parse_int(value)
        if n is None:
            issues.append(ParseIssue(ERROR, lineno, f"{key} must be an integer, got {value}"))
        elif n != actual:
            issues.append(ParseIssue(ERROR, lineno, f"{key}={n} but {actual} sections present"))
        declared[key] = n

    in_vars = [_parse_variable(s, issues) for s in inputs]
    out_vars = [_parse_variable(s, issues) for s in outputs]

    rules, rule_lines = [], []
    for sec in rules_sec[:1]:
        for lineno, line in sec.entries:
            rule = _parse_rule(lineno, line, issues)
            if rule is not None:
                rules.append(rule)
                rule_lines.append(lineno)
    if "NumRules" in sysvals:
        lineno, value = sysvals["NumRules"]
        n = _parse_int(value)
        n_lines = len(rules_sec[0].entries) if rules_sec else 0
        if n is None:
            issues.append(ParseIssue(ERROR, lineno, f"NumRules must be an integer, got {value}"))
        elif n != n_lines:
            issues.append(ParseIssue(ERROR, lineno, f"rule count mismatch: NumRules={n} but {n_lines} rule lines"))
    elif system:
        issues.append(ParseIssue(ERROR, sys_line, "[System] is missing NumRules"))

    if any(i.severity == ERROR for i in issues) or None in in_vars or None in out_vars:
        return None, issues

    fis = FisDefinition(
        name=name, inputs=tuple(in_vars), outputs=tuple(out_vars), rules=tuple(rules), version=version
    )
    locations = {("input", i): s.line for i, s in enumerate(inputs)}
    locations.update({("output", i): s.line for i, s in enumerate(outputs)})
    locations.update({("rule", i): ln for i, ln in enumerate(rule_lines)})
    issues.extend(_validate(fis, locations))
    if any(i.severity == ERROR for i in issues):
        return None, issues
    return fis, issues


def parse_fis(text: str) -> FisDefinition:
    """Parse ``.fis`` text into a validated :class:`FisDefinition`.

    Raises :class:`FisParseError` listing every issue if any error was found.
    """
    fis, issues = parse_fis_with_issues(text)
    if fis is None:
        raise FisParseError(issues)
    return fis


def load_fis(path) -> FisDefinition:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_fis(fh.read())


def paper_fis_text() -> str:
    return resources.files(__package__).joinpath("data/speech_accuracy.fis").read_text(encoding="utf-8")


def paper_fis() -> FisDefinition:
    """The bundled three-input speech accuracy system."""
    return parse_fis(paper_fis_text())


def validate(fis: FisDefinition) -> list[ParseIssue]:
    """Check a definition's invariants.

    Returns an empty list iff the definition is fully valid; warnings flag
    MF supports extending past a variable's range and output MFs that no rule
    can produce.
    """
    return _validate(fis, {})


def _validate(fis: FisDefinition, locations: dict) -> list[ParseIssue]:
    issues = []

    def add(severity, key, message):
        issues.append(ParseIssue(severity, locations.get(key, 0), message))

    methods = {
        "AndMethod": fis.and_method,
        "OrMethod": fis.or_method,
        "ImpMethod": fis.implication,
        "AggMethod": fis.aggregation,
        "DefuzzMethod": fis.defuzz,
    }
    for key, value in methods.items():
        if value != _REQUIRED_METHODS[key]:
            add(ERROR, None, f"unsupported {key} '{value}'")
    if not fis.inputs:
        add(ERROR, None, "system needs at least one input")
    if not fis.outputs:
        add(ERROR, None, "system needs at least one output")

    for kind, variables in (("input", fis.inputs), ("output", fis.outputs)):
        for i, var in enumerate(variables):
            lo, hi = var.range
            for mf in var.mfs:
                a, c = mf.support
                if a < lo or c > hi:
                    if math.isinf(a) and math.isinf(c):
                        continue
                    add(WARNING, (kind, i), f"{kind} '{var.name}' MF '{mf.name}' support [{a:g} {c:g}] "
                                            f"extends past range [{lo:g} {hi:g}]")

    used_outputs = set()
    for r, rule in enumerate(fis.rules):
        key = ("rule", r)
        if len(rule.antecedent) != len(fis.inputs):
            add(ERROR, key, f"rule {r + 1} has {len(rule.antecedent)} antecedents for {len(fis.inputs)} inputs")
            continue
        if len(rule.consequent) != len(fis.outputs):
            add(ERROR, key, f"rule {r + 1} has {len(rule.consequent)} consequents for {len(fis.outputs)} outputs")
            continue
        if not any(rule.antecedent):
            add(ERROR, key, f"rule {r + 1} needs at least one nonzero antecedent")
        if not 0 < rule.weight <= 1:
            add(ERROR, key, f"rule {r + 1} weight {rule.weight:g} outside (0, 1]")
        for i, k in enumerate(rule.antecedent):
            if k < 0:
                add(ERROR, key, f"rule {r + 1}: unsupported feature: negated (NOT) index {k}")
            elif k > len(fis.inputs[i].mfs):
                add(ERROR, key, f"rule {r + 1} references MF {k} of input '{fis.inputs[i].name}', "
                                f"which has {len(fis.inputs[i].mfs)}")
        for o, k in enumerate(rule.consequent):
            if k <= 0:
                add(ERROR, key, f"rule {r + 1} consequent index must be positive, got {k}")
            elif k > len(fis.outputs[o].mfs):
                add(ERROR, key, f"rule {r + 1} references MF {k} of output '{fis.outputs[o].name}', "
                                f"which has {len(fis.outputs[o].mfs)}")
            else:
                used_outputs.add((o, k))

    for o, var in enumerate(fis.outputs):
        for k, mf in enumerate(var.mfs, start=1):
            if (o, k) not in used_outputs:
                add(WARNING, ("output", o), f"output '{var.name}' MF '{mf.name}' is not produced by any rule")
    return issues


def _num(v: float) -> str:
    text = repr(float(v))
    return text[:-2] if text.endswith(".0") else text


def serialize_fis(fis: FisDefinition) -> str:
    """Render ``fis`` as ``.fis`` text (LF line endings, shortest exact floats)."""
    out = [
        "[System]",
        f"Name='{fis.name}'",
        "Type='mamdani'",
        f"Version={fis.version}",
        f"NumInputs={len(fis.inputs)}",
        f"NumOutputs={len(fis.outputs)}",
        f"NumRules={len(fis.rules)}",
        f"AndMethod='{fis.and_method}'",
        f"OrMethod='{fis.or_method}'",
        f"ImpMethod='{fis.implication}'",
        f"AggMethod='{fis.aggregation}'",
        f"DefuzzMethod='{fis.defuzz}'",
    ]
    for header, variables in (("Input", fis.inputs), ("Output", fis.outputs)):
        for i, var in enumerate(variables, start=1):
            out += [
                "",
                f"[{header}{i}]",
                f"Name='{var.name}'",
                f"Range=[{_num(var.range[0])} {_num(var.range[1])}]",
                f"NumMFs={len(var.mfs)}",
            ]
            for k, mf in enumerate(var.mfs, start=1):
                params = " ".join(_num(p) for p in mf.params)
                out.append(f"MF{k}='{mf.name}':'{mf.kind}',[{params}]")
    out += ["", "[Rules]"]
    for rule in fis.rules:
        ante = " ".join(str(k) for k in rule.antecedent)
        cons = " ".join(str(k) for k in rule.consequent)
        conn = 1 if rule.connective == AND else 2
        out.append(f"{ante}, {cons} ({_num(rule.weight)}) : {conn}")
    return "\n".join(out) + "\n"
