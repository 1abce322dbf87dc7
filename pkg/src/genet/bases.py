"""Base-theory templates and constraint-checked instantiation.

A template fixes consequentiality and (usually) the patient-kind set,
ships default principles, and declares how the principle collection may
be edited when a person or business instantiates it: ``add`` (append
only), ``remove`` (delete only), ``none`` (frozen), or ``all``.

Templates are plain JSON data files, one per base theory, so new
second-layer theories can be added without code changes. The builtin
four live in ``genet/data/bases/``; see the README for the key schema.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Optional

from .model import (
    EthicalTheoryInstance,
    InfluenceThresholds,
    MoralAgent,
    MoralPrinciple,
    PatientKind,
    Subject,
    Violation,
    validate_instance,
)

BASE_DIR_ENV = "GENET_BASE_DIR"

# Instantiation / conformance codes.
MUTABILITY_VIOLATION = "MUTABILITY_VIOLATION"
FIXED_FIELD_VIOLATION = "FIXED_FIELD_VIOLATION"
EMPTY_PRINCIPLES = "EMPTY_PRINCIPLES"
UNKNOWN_REMOVAL = "UNKNOWN_REMOVAL"
DUPLICATE_PRINCIPLE = "DUPLICATE_PRINCIPLE"
UNKNOWN_BASE_THEORY = "UNKNOWN_BASE_THEORY"
CONSEQUENTIALITY_MISMATCH = "CONSEQUENTIALITY_MISMATCH"
NOT_REACHABLE = "NOT_REACHABLE"
INVALID_INSTANCE = "INVALID_INSTANCE"


class Mutability(Enum):
    ADD = "add"
    REMOVE = "remove"
    NONE = "none"
    ALL = "all"


@dataclass(frozen=True)
class BaseTheoryTemplate:
    name: str
    consequentiality: bool
    defaultPrinciples: tuple[MoralPrinciple, ...]
    mutability: Mutability
    fixedPatientKinds: Optional[frozenset[PatientKind]] = None
    freeFields: tuple[str, ...] = ("agent", "influenceThresholds", "instanceName")


@dataclass(frozen=True)
class PrincipleEdit:
    """A single change to the default principle collection."""

    kind: str  # "addPrinciple" | "removePrinciple"
    principle: MoralPrinciple

    @staticmethod
    def add(principle: MoralPrinciple) -> "PrincipleEdit":
        return PrincipleEdit("addPrinciple", principle)

    @staticmethod
    def remove(principle: MoralPrinciple) -> "PrincipleEdit":
        return PrincipleEdit("removePrinciple", principle)


@dataclass(frozen=True)
class ConformanceReport:
    violations: tuple[Violation, ...] = ()

    @property
    def conformant(self) -> bool:
        return not self.violations

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]


class InstantiationError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class UnknownBaseTheoryError(KeyError):
    def __init__(self, name: str):
        super().__init__(f"no base theory named {name!r} is registered")
        self.code = UNKNOWN_BASE_THEORY
        self.name = name


def _template_from_dict(data: dict, source: str) -> BaseTheoryTemplate:
    try:
        principles = tuple(
            MoralPrinciple(morality=bool(p["morality"]),
                           subject=Subject(p["subject"]),
                           specification=p["specification"])
            for p in data["defaultPrinciples"])
        fixed = data.get("fixedPatientKinds")
        template = BaseTheoryTemplate(
            name=data["name"],
            consequentiality=bool(data["consequentiality"]),
            defaultPrinciples=principles,
            mutability=Mutability(data["mutability"]),
            fixedPatientKinds=None if fixed is None
            else frozenset(PatientKind(k) for k in fixed),
            freeFields=tuple(data.get("freeFields",
                                      ("agent", "influenceThresholds", "instanceName"))),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ValueError(f"malformed base-theory template {source}: {exc}") from exc
    if not template.defaultPrinciples:
        raise ValueError(f"base-theory template {source} has no default principles")
    return template


def load_template(path: Path) -> BaseTheoryTemplate:
    with open(path, "rb") as handle:
        return _template_from_dict(json.load(handle), str(path))


class Registry:
    """Immutable-after-load lookup of base-theory templates by name."""

    def __init__(self, templates: list[BaseTheoryTemplate]):
        self._by_name = {t.name: t for t in templates}

    def names(self) -> list[str]:
        return sorted(self._by_name)

    def get(self, name: str) -> BaseTheoryTemplate:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownBaseTheoryError(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self._by_name


def load_registry(base_dir: Optional[Path] = None) -> Registry:
    """Load templates from a directory of ``*.json`` files.

    Defaults to the packaged builtin directory; the GENET_BASE_DIR
    environment variable overrides it (CLI contract).
    """
    if base_dir is None:
        env = os.environ.get(BASE_DIR_ENV)
        if env:
            base_dir = Path(env)
    if base_dir is not None:
        paths = sorted(Path(base_dir).glob("*.json"))
        return Registry([load_template(p) for p in paths])
    root = resources.files("genet").joinpath("data/bases")
    templates = []
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            templates.append(_template_from_dict(json.loads(entry.read_text("utf-8")),
                                                 entry.name))
    return Registry(templates)


def builtin_bases() -> list[BaseTheoryTemplate]:
    """The four packaged templates, in name order."""
    registry = load_registry()
    return [registry.get(name) for name in registry.names()]


def _key(p: MoralPrinciple) -> tuple[str, str]:
    return (p.specification, p.subject.value)


def instantiate(base: BaseTheoryTemplate,
                agent: MoralAgent,
                thresholds: InfluenceThresholds,
                instanceName: Optional[str] = None,
                patientKinds: Optional[frozenset[PatientKind]] = None,
                edits: list[PrincipleEdit] = ()) -> EthicalTheoryInstance:
    """Derive a theory instance from a template under its constraints.

    Fixed fields are copied verbatim and may not be contradicted; edits
    are applied in order and must be legal for the template's mutability
    mode. The result always passes validate_instance.
    """
    if base.fixedPatientKinds is not None:
        if patientKinds is not None and frozenset(patientKinds) != base.fixedPatientKinds:
            raise InstantiationError(
                FIXED_FIELD_VIOLATION,
                f"{base.name} fixes patientKinds to "
                f"{sorted(k.value for k in base.fixedPatientKinds)}")
        kinds = base.fixedPatientKinds
    else:
        if patientKinds is None:
            raise InstantiationError(
                FIXED_FIELD_VIOLATION,
                f"{base.name} leaves patientKinds free; the instantiator must supply them")
        kinds = frozenset(patientKinds)

    may_add = base.mutability in (Mutability.ADD, Mutability.ALL)
    may_remove = base.mutability in (Mutability.REMOVE, Mutability.ALL)
    principles = list(base.defaultPrinciples)
    for edit in edits:
        if edit.kind == "addPrinciple":
            if not may_add:
                raise InstantiationError(
                    MUTABILITY_VIOLATION,
                    f"{base.name} (mutability={base.mutability.value}) "
                    f"forbids adding principles")
            if any(_key(p) == _key(edit.principle) for p in principles):
                raise InstantiationError(
                    DUPLICATE_PRINCIPLE,
                    f"principle {_key(edit.principle)} is already present")
            principles.append(edit.principle)
        elif edit.kind == "removePrinciple":
            if not may_remove:
                raise InstantiationError(
                    MUTABILITY_VIOLATION,
                    f"{base.name} (mutability={base.mutability.value}) "
                    f"forbids removing principles")
            matches = [p for p in principles if _key(p) == _key(edit.principle)]
            if not matches:
                raise InstantiationError(
                    UNKNOWN_REMOVAL,
                    f"no principle {_key(edit.principle)} to remove")
            principles.remove(matches[0])
        else:
            raise InstantiationError(MUTABILITY_VIOLATION,
                                     f"unknown edit kind {edit.kind!r}")
    if not principles:
        raise InstantiationError(EMPTY_PRINCIPLES,
                                 "edits left the principle collection empty")

    instance = EthicalTheoryInstance(
        baseTheory=base.name,
        instanceName=instanceName,
        consequentiality=base.consequentiality,
        agent=agent,
        patientKinds=kinds,
        influenceThresholds=thresholds,
        principles=tuple(principles),
    )
    report = validate_instance(instance)
    if not report.ok:
        raise InstantiationError(INVALID_INSTANCE,
                                 f"instantiation produced an invalid instance: "
                                 f"{report.codes()}")
    return instance


def reachable(template: BaseTheoryTemplate,
              principles: tuple[MoralPrinciple, ...]) -> bool:
    """Whether a principle list can be produced from the template's
    defaults by some legal edit sequence."""
    if not principles:
        return False
    have = {_key(p): p for p in principles}
    if len(have) != len(principles):
        return False
    defaults = {_key(p): p for p in template.defaultPrinciples}
    added = [k for k in have if k not in defaults]
    removed = [k for k in defaults if k not in have]
    # A retained default with flipped morality counts as remove + add.
    for key in set(have) & set(defaults):
        if have[key] != defaults[key]:
            added.append(key)
            removed.append(key)
    if template.mutability is Mutability.ALL:
        return True
    if template.mutability is Mutability.NONE:
        return not added and not removed
    if template.mutability is Mutability.ADD:
        return not removed
    return not added  # Mutability.REMOVE


def check_conformance(instance: EthicalTheoryInstance,
                      registry: Registry) -> ConformanceReport:
    """Verify an instance against its registered template: fixed fields
    match and the principle list is reachable under the mutability mode.

    Raises UnknownBaseTheoryError when the base theory is not registered.
    """
    template = registry.get(instance.baseTheory)
    out: list[Violation] = []
    if instance.consequentiality != template.consequentiality:
        out.append(Violation(
            CONSEQUENTIALITY_MISMATCH, "consequentiality",
            f"{template.name} fixes consequentiality="
            f"{str(template.consequentiality).lower()}"))
    if (template.fixedPatientKinds is not None
            and instance.patientKinds != template.fixedPatientKinds):
        out.append(Violation(
            FIXED_FIELD_VIOLATION, "patientKinds",
            f"{template.name} fixes patientKinds to "
            f"{sorted(k.value for k in template.fixedPatientKinds)}"))
    if not reachable(template, instance.principles):
        out.append(Violation(
            NOT_REACHABLE, "principles",
            f"principle list is not reachable from {template.name} defaults "
            f"under mutability={template.mutability.value}"))
    return ConformanceReport(tuple(out))
