"""Reading, writing, and schema validation of theory XML documents.

The document format: root ``ethicalTheory`` in the namespace
``http://genet.cs.uct.ac.za`` with attributes baseTheory (required),
instanceName (optional), consequentiality (required), and child elements
agent, patientKinds, influenceThresholds, principles, in that order.

Validation is implemented directly from the schema constraints so that
diagnostics are identical across platforms; the authoritative XSD ships
in ``genet/data/schema/ethicalTheory.xsd`` and conformance against it is
exercised by the test suite.
"""

from __future__ import annotations

import re
from xml.etree import ElementTree
from xml.sax.saxutils import escape, quoteattr

from .model import (
    EthicalTheoryInstance,
    InfluenceThresholds,
    MoralAgent,
    MoralPrinciple,
    PatientKind,
    Subject,
    ValidationReport,
    Violation,
    validate_instance,
)

GENET_NS = "http://genet.cs.uct.ac.za"
XSI_NS = "http://www.w3.org/2001/XMLSchema-instance"

# Schema-level violation codes.
WELL_FORMEDNESS = "WELL_FORMEDNESS"
NAMESPACE_MISMATCH = "NAMESPACE_MISMATCH"
MISSING_ATTRIBUTE = "MISSING_ATTRIBUTE"
UNEXPECTED_ATTRIBUTE = "UNEXPECTED_ATTRIBUTE"
MISSING_ELEMENT = "MISSING_ELEMENT"
UNEXPECTED_ELEMENT = "UNEXPECTED_ELEMENT"
UNEXPECTED_TEXT = "UNEXPECTED_TEXT"
BAD_BOOLEAN = "BAD_BOOLEAN"
BAD_INTEGER = "BAD_INTEGER"
PERCENT_OUT_OF_RANGE = "PERCENT_OUT_OF_RANGE"
ENUM_VIOLATION = "ENUM_VIOLATION"
MIN_OCCURS = "MIN_OCCURS"
DUPLICATE_PATIENT_KIND = "DUPLICATE_PATIENT_KIND"

# Error categories carried by TheoryParseError.code.
SCHEMA_VIOLATION = "SCHEMA_VIOLATION"
INVALID_INSTANCE = "INVALID_INSTANCE"

_INTEGER_RE = re.compile(r"^[+-]?[0-9]+$")
_BOOLEANS = {"true": True, "1": True, "false": False, "0": False}


class TheoryParseError(ValueError):
    """Raised when a document cannot be decoded into a theory instance.

    ``code`` is one of WELL_FORMEDNESS, NAMESPACE_MISMATCH,
    SCHEMA_VIOLATION, or INVALID_INSTANCE; ``report`` carries the
    individual violations where applicable.
    """

    def __init__(self, code: str, report: ValidationReport, message: str):
        super().__init__(message)
        self.code = code
        self.report = report


class InvalidInstanceError(ValueError):
    """Raised by emit_theory when the instance fails validation."""

    def __init__(self, report: ValidationReport):
        super().__init__(f"instance is invalid: {report.codes()}")
        self.code = INVALID_INSTANCE
        self.report = report


def _qname(local: str) -> str:
    return f"{{{GENET_NS}}}{local}"


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _check_attrs(elem, path: str, required: list[str], optional: list[str],
                 out: list[Violation]) -> None:
    for name in required:
        if name not in elem.attrib:
            out.append(Violation(MISSING_ATTRIBUTE, f"{path}@{name}",
                                 f"required attribute {name!r} is missing"))
    allowed = set(required) | set(optional)
    for name in elem.attrib:
        if name.startswith("{"):
            # Namespace-qualified attributes: tolerate the standard
            # XML Schema instance attributes (schemaLocation etc.).
            if name.startswith(f"{{{XSI_NS}}}"):
                continue
            out.append(Violation(UNEXPECTED_ATTRIBUTE, f"{path}@{name}",
                                 f"attribute {name!r} is not defined by the schema"))
        elif name not in allowed:
            out.append(Violation(UNEXPECTED_ATTRIBUTE, f"{path}@{name}",
                                 f"attribute {name!r} is not defined by the schema"))


def _check_no_text(elem, path: str, out: list[Violation]) -> None:
    texts = [elem.text or ""] + [child.tail or "" for child in elem]
    if any(t.strip() for t in texts):
        out.append(Violation(UNEXPECTED_TEXT, path,
                             "element must not contain character data"))


def _read_boolean(elem, name: str, path: str, out: list[Violation]):
    raw = elem.get(name)
    if raw is None:
        return None
    value = _BOOLEANS.get(raw.strip())
    if value is None:
        out.append(Violation(BAD_BOOLEAN, f"{path}@{name}",
                             f"not a boolean: {raw!r}"))
    return value


def _read_percentage(elem, name: str, path: str, out: list[Violation]):
    raw = elem.get(name)
    if raw is None:
        return None
    text = raw.strip()
    if not _INTEGER_RE.match(text):
        out.append(Violation(BAD_INTEGER, f"{path}@{name}",
                             f"not an integer: {raw!r}"))
        return None
    value = int(text)
    if not 0 <= value <= 100:
        out.append(Violation(PERCENT_OUT_OF_RANGE, f"{path}@{name}",
                             f"percentage {value} outside [0, 100]"))
        return None
    return value


def _decode(doc: bytes):
    """Structural walk shared by schema_check and parse_theory.

    Returns (schema violations, decoded instance or None). The instance
    is only built when the document is schema-clean.
    """
    out: list[Violation] = []
    try:
        root = ElementTree.fromstring(doc)
    except ElementTree.ParseError as exc:
        return [Violation(WELL_FORMEDNESS, "/", f"not well-formed XML: {exc}")], None

    if root.tag != _qname("ethicalTheory"):
        if _local(root.tag) == "ethicalTheory":
            return [Violation(NAMESPACE_MISMATCH, "/ethicalTheory",
                              f"root element is not in namespace {GENET_NS}")], None
        return [Violation(UNEXPECTED_ELEMENT, f"/{_local(root.tag)}",
                          "root element must be ethicalTheory")], None

    path = "/ethicalTheory"
    _check_attrs(root, path, ["baseTheory", "consequentiality"], ["instanceName"], out)
    consequentiality = _read_boolean(root, "consequentiality", path, out)
    _check_no_text(root, path, out)

    # The schema demands this exact child sequence.
    expected = ["agent", "patientKinds", "influenceThresholds", "principles"]
    found: dict[str, ElementTree.Element] = {}
    cursor = 0
    for child in root:
        name = _local(child.tag)
        if not child.tag.startswith(f"{{{GENET_NS}}}") or name not in expected:
            out.append(Violation(UNEXPECTED_ELEMENT, f"{path}/{name}",
                                 f"element {name!r} is not defined by the schema"))
            continue
        index = expected.index(name)
        if name in found:
            out.append(Violation(UNEXPECTED_ELEMENT, f"{path}/{name}",
                                 f"element {name!r} occurs more than once"))
            continue
        if index < cursor:
            out.append(Violation(UNEXPECTED_ELEMENT, f"{path}/{name}",
                                 f"element {name!r} is out of sequence"))
            continue
        found[name] = child
        cursor = index
    for name in expected:
        if name not in found:
            out.append(Violation(MISSING_ELEMENT, f"{path}/{name}",
                                 f"required element {name!r} is missing"))

    agent = None
    if (elem := found.get("agent")) is not None:
        apath = f"{path}/agent"
        _check_attrs(elem, apath, ["name"], ["reference"], out)
        _check_no_text(elem, apath, out)
        for child in elem:
            out.append(Violation(UNEXPECTED_ELEMENT, f"{apath}/{_local(child.tag)}",
                                 "agent has no child elements"))
        agent = MoralAgent(name=elem.get("name", ""), reference=elem.get("reference"))

    kinds: list[PatientKind] = []
    if (elem := found.get("patientKinds")) is not None:
        kpath = f"{path}/patientKinds"
        _check_attrs(elem, kpath, [], [], out)
        _check_no_text(elem, kpath, out)
        children = list(elem)
        if not children:
            out.append(Violation(MIN_OCCURS, f"{kpath}/patientKind",
                                 "at least one patientKind is required"))
        for i, child in enumerate(children):
            cpath = f"{kpath}/patientKind[{i}]"
            if child.tag != _qname("patientKind"):
                out.append(Violation(UNEXPECTED_ELEMENT, cpath,
                                     f"unexpected element {_local(child.tag)!r}"))
                continue
            _check_attrs(child, cpath, [], [], out)
            text = child.text or ""
            try:
                kinds.append(PatientKind(text))
            except ValueError:
                out.append(Violation(ENUM_VIOLATION, cpath,
                                     f"patientKind {text!r} outside enumeration "
                                     f"{[k.value for k in PatientKind]}"))

    thresholds = None
    if (elem := found.get("influenceThresholds")) is not None:
        tpath = f"{path}/influenceThresholds"
        _check_attrs(elem, tpath, ["external", "substance"], [], out)
        _check_no_text(elem, tpath, out)
        for child in elem:
            out.append(Violation(UNEXPECTED_ELEMENT, f"{tpath}/{_local(child.tag)}",
                                 "influenceThresholds has no child elements"))
        external = _read_percentage(elem, "external", tpath, out)
        substance = _read_percentage(elem, "substance", tpath, out)
        if external is not None and substance is not None:
            thresholds = InfluenceThresholds(external=external, substance=substance)

    principles: list[MoralPrinciple] = []
    if (elem := found.get("principles")) is not None:
        ppath = f"{path}/principles"
        _check_attrs(elem, ppath, [], [], out)
        _check_no_text(elem, ppath, out)
        children = list(elem)
        if not children:
            out.append(Violation(MIN_OCCURS, f"{ppath}/principle",
                                 "at least one principle is required"))
        for i, child in enumerate(children):
            cpath = f"{ppath}/principle[{i}]"
            if child.tag != _qname("principle"):
                out.append(Violation(UNEXPECTED_ELEMENT, cpath,
                                     f"unexpected element {_local(child.tag)!r}"))
                continue
            _check_attrs(child, cpath, ["morality", "subject", "specification"], [], out)
            _check_no_text(child, cpath, out)
            morality = _read_boolean(child, "morality", cpath, out)
            subject_raw = child.get("subject")
            subject = None
            if subject_raw is not None:
                try:
                    subject = Subject(subject_raw)
                except ValueError:
                    out.append(Violation(ENUM_VIOLATION, f"{cpath}@subject",
                                         f"subject {subject_raw!r} outside enumeration "
                                         f"{[s.value for s in Subject]}"))
            specification = child.get("specification")
            if morality is not None and subject is not None and specification is not None:
                principles.append(MoralPrinciple(morality=morality, subject=subject,
                                                 specification=specification))

    if out:
        return out, None

    instance = EthicalTheoryInstance(
        baseTheory=root.get("baseTheory", ""),
        instanceName=root.get("instanceName"),
        consequentiality=consequentiality,
        agent=agent,
        patientKinds=frozenset(kinds),
        influenceThresholds=thresholds,
        principles=tuple(principles),
    )
    # The XSD tolerates repeated patientKind values; the model is a set,
    # so decoding them would be lossy. Reject instead.
    if len(kinds) != len(set(kinds)):
        dup = Violation(DUPLICATE_PATIENT_KIND, f"{path}/patientKinds",
                        "patientKind values must be distinct")
        return [dup], instance
    return [], instance


def schema_check(doc: bytes) -> ValidationReport:
    """Report every schema constraint the document violates.

    Empty report = the document validates against the theory schema.
    """
    violations, _ = _decode(doc)
    return ValidationReport(tuple(violations))


def parse_theory(doc: bytes) -> EthicalTheoryInstance:
    """Decode a theory document, enforcing both the schema and the
    in-memory model invariants. Unknown elements and attributes are
    hard errors, never skipped.
    """
    violations, instance = _decode(doc)
    if violations:
        report = ValidationReport(tuple(violations))
        code = violations[0].code
        if code == WELL_FORMEDNESS:
            raise TheoryParseError(WELL_FORMEDNESS, report, str(violations[0].message))
        if code == NAMESPACE_MISMATCH:
            raise TheoryParseError(NAMESPACE_MISMATCH, report, str(violations[0].message))
        if code == DUPLICATE_PATIENT_KIND:
            raise TheoryParseError(INVALID_INSTANCE, report, str(violations[0].message))
        raise TheoryParseError(SCHEMA_VIOLATION, report,
                               f"schema violations: {report.codes()}")
    core = validate_instance(instance)
    if not core.ok:
        raise TheoryParseError(INVALID_INSTANCE, core,
                               f"document decodes to an invalid instance: {core.codes()}")
    return instance


# Canonical order for emitting the patient-kind set.
_KIND_ORDER = {kind: i for i, kind in enumerate(PatientKind)}


def _fmt_bool(value: bool) -> str:
    return "true" if value else "false"


def emit_theory(instance: EthicalTheoryInstance) -> bytes:
    """Serialize an instance to its canonical document form.

    Deterministic: fixed attribute order, 4-space indentation, UTF-8
    with an XML declaration. Round-trips exactly through parse_theory.
    """
    report = validate_instance(instance)
    if not report.ok:
        raise InvalidInstanceError(report)

    lines = ['<?xml version="1.0" encoding="UTF-8"?>']
    attrs = [f"xmlns={quoteattr(GENET_NS)}",
             f"baseTheory={quoteattr(instance.baseTheory)}"]
    if instance.instanceName is not None:
        attrs.append(f"instanceName={quoteattr(instance.instanceName)}")
    attrs.append(f"consequentiality={quoteattr(_fmt_bool(instance.consequentiality))}")
    lines.append(f"<ethicalTheory {' '.join(attrs)}>")

    agent_attrs = [f"name={quoteattr(instance.agent.name)}"]
    if instance.agent.reference is not None:
        agent_attrs.append(f"reference={quoteattr(instance.agent.reference)}")
    lines.append(f"    <agent {' '.join(agent_attrs)}/>")

    lines.append("    <patientKinds>")
    for kind in sorted(instance.patientKinds, key=_KIND_ORDER.__getitem__):
        lines.append(f"        <patientKind>{escape(kind.value)}</patientKind>")
    lines.append("    </patientKinds>")

    t = instance.influenceThresholds
    lines.append(f'    <influenceThresholds external="{t.external}" '
                 f'substance="{t.substance}"/>')

    lines.append("    <principles>")
    for p in instance.principles:
        lines.append(f"        <principle morality={quoteattr(_fmt_bool(p.morality))} "
                     f"subject={quoteattr(p.subject.value)} "
                     f"specification={quoteattr(p.specification)}/>")
    lines.append("    </principles>")
    lines.append("</ethicalTheory>")
    return ("\n".join(lines) + "\n").encode("utf-8")
