"""Canonical catalogue of the 103 detectable refactoring types.

Each type carries a unique abbreviation, one of ten groups, and a flag
marking the twelve types that have ground-truth motivations in the
reference study.  Type names must match tool output exactly; lookups are
strict and never coerce unknown strings.
"""

from __future__ import annotations

from dataclasses import dataclass

COMPOSING_METHODS = "Composing Methods"
MOVING_FEATURES = "Moving Features between Objects"
MANAGE_MODIFIERS = "Manage Objects Modifiers"
ORGANIZING_DATA = "Organizing Data"
SIMPLIFYING_CALLS = "Simplifying Method Calls"
GENERALIZATION = "Dealing with Generalization"
OBJECT_REPLACEMENT = "Object Replacement"
PACKAGE_MANAGEMENT = "Package Management"
TEST_SPECIFIC = "Test Specific"
OTHERS = "Others"

GROUPS = (
    COMPOSING_METHODS,
    MOVING_FEATURES,
    MANAGE_MODIFIERS,
    ORGANIZING_DATA,
    SIMPLIFYING_CALLS,
    GENERALIZATION,
    OBJECT_REPLACEMENT,
    PACKAGE_MANAGEMENT,
    TEST_SPECIFIC,
    OTHERS,
)


@dataclass(frozen=True)
class RefactoringType:
    name: str
    abbreviation: str
    group: str
    in_reference_study: bool = False


# (name, abbreviation, group, in reference study)
_CATALOGUE: list[tuple[str, str, str, bool]] = [
    # Composing Methods
    ("Extract Method", "EM", COMPOSING_METHODS, True),
    ("Inline Method", "IM", COMPOSING_METHODS, True),
    ("Merge Method", "MerM", COMPOSING_METHODS, False),
    ("Split Method", "SM", COMPOSING_METHODS, False),
    ("Extract Variable", "EV", COMPOSING_METHODS, False),
    ("Inline Variable", "IV", COMPOSING_METHODS, False),
    ("Split Variable", "SV", COMPOSING_METHODS, False),
    ("Merge Variable", "MV", COMPOSING_METHODS, False),
    ("Rename Variable", "RV", COMPOSING_METHODS, False),
    ("Change Variable Type", "CVT", COMPOSING_METHODS, False),
    ("Move Code", "MCode", COMPOSING_METHODS, False),
    ("Merge Catch", "MCat", COMPOSING_METHODS, False),
    ("Merge Conditional", "MCon", COMPOSING_METHODS, False),
    ("Split Conditional", "SC", COMPOSING_METHODS, False),
    # Moving Features between Objects
    ("Extract Class", "EC", MOVING_FEATURES, False),
    ("Move Class", "MovC", MOVING_FEATURES, True),
    ("Rename Class", "RC", MOVING_FEATURES, False),
    ("Move Method", "MM", MOVING_FEATURES, True),
    ("Move Attribute", "MA", MOVING_FEATURES, True),
    ("Localize Parameter", "LP", MOVING_FEATURES, False),
    ("Replace Attribute", "RepA", MOVING_FEATURES, False),
    ("Replace Attribute With Variable", "RAWV", MOVING_FEATURES, False),
    # Manage Objects Modifiers
    ("Change Attribute Access Modifier", "CAAM", MANAGE_MODIFIERS, False),
    ("Change Class Access Modifier", "CCAM", MANAGE_MODIFIERS, False),
    ("Change Type Declaration Kind", "CTDK", MANAGE_MODIFIERS, False),
    ("Add Method Modifier", "AMM", MANAGE_MODIFIERS, False),
    ("Add Attribute Modifier", "AAM", MANAGE_MODIFIERS, False),
    ("Add Variable Modifier", "AVM", MANAGE_MODIFIERS, False),
    ("Add Parameter Modifier", "APM", MANAGE_MODIFIERS, False),
    ("Add Class Modifier", "ACM", MANAGE_MODIFIERS, False),
    ("Remove Method Modifier", "RMM", MANAGE_MODIFIERS, False),
    ("Remove Attribute Modifier", "RAM", MANAGE_MODIFIERS, False),
    ("Remove Variable Modifier", "RVM", MANAGE_MODIFIERS, False),
    ("Remove Parameter Modifier", "RPM", MANAGE_MODIFIERS, False),
    ("Remove Class Modifier", "RCM", MANAGE_MODIFIERS, False),
    # Organizing Data
    ("Extract Attribute", "ExA", ORGANIZING_DATA, False),
    ("Split Attribute", "SA", ORGANIZING_DATA, False),
    ("Merge Attribute", "MerA", ORGANIZING_DATA, False),
    ("Rename Attribute", "RA", ORGANIZING_DATA, False),
    ("Inline Attribute", "IA", ORGANIZING_DATA, False),
    ("Encapsulate Attribute", "EnA", ORGANIZING_DATA, False),
    ("Parameterize Attribute", "PA", ORGANIZING_DATA, False),
    ("Change Attribute Type", "CAT", ORGANIZING_DATA, False),
    ("Replace Variable With Attribute", "RVWA", ORGANIZING_DATA, False),
    # Simplifying Method Calls
    ("Split Parameter", "SP", SIMPLIFYING_CALLS, False),
    ("Merge Parameter", "MParam", SIMPLIFYING_CALLS, False),
    ("Add Parameter", "AP", SIMPLIFYING_CALLS, False),
    ("Remove Parameter", "RemP", SIMPLIFYING_CALLS, False),
    ("Rename Parameter", "RenP", SIMPLIFYING_CALLS, False),
    ("Reorder Parameter", "RParam", SIMPLIFYING_CALLS, False),
    ("Parameterize Variable", "PV", SIMPLIFYING_CALLS, False),
    ("Change Parameter Type", "CPT", SIMPLIFYING_CALLS, False),
    ("Change Method Access Modifier", "CMAM", SIMPLIFYING_CALLS, False),
    ("Change Return Type", "CRT", SIMPLIFYING_CALLS, False),
    ("Rename Method", "RM", SIMPLIFYING_CALLS, False),
    # Dealing with Generalization
    ("Extract Superclass", "ESup", GENERALIZATION, True),
    ("Extract Subclass", "ESub", GENERALIZATION, False),
    ("Extract Interface", "EI", GENERALIZATION, True),
    ("Pull Up Attribute", "PUA", GENERALIZATION, True),
    ("Push Down Attribute", "PDA", GENERALIZATION, True),
    ("Pull Up Method", "PUM", GENERALIZATION, True),
    ("Push Down Method", "PDM", GENERALIZATION, True),
    ("Split Class", "SClass", GENERALIZATION, False),
    ("Merge Class", "MerC", GENERALIZATION, False),
    # Object Replacement
    ("Replace Loop With Pipeline", "RLWP", OBJECT_REPLACEMENT, False),
    ("Replace Pipeline With Loop", "RPWL", OBJECT_REPLACEMENT, False),
    ("Replace Anonymous With Lambda", "RAWL", OBJECT_REPLACEMENT, False),
    ("Replace Anonymous With Class", "RAWC", OBJECT_REPLACEMENT, False),
    ("Replace Generic With Diamond", "RGWD", OBJECT_REPLACEMENT, False),
    ("Replace Conditional With Ternary", "RCWT", OBJECT_REPLACEMENT, False),
    # Package Management
    ("Rename Package", "RPack", PACKAGE_MANAGEMENT, True),
    ("Move Package", "MP", PACKAGE_MANAGEMENT, False),
    ("Split Package", "SPack", PACKAGE_MANAGEMENT, False),
    ("Merge Package", "MPack", PACKAGE_MANAGEMENT, False),
    # Test Specific
    ("Parameterize Test", "PT", TEST_SPECIFIC, False),
    ("Assert Throws", "AT", TEST_SPECIFIC, False),
    # Others: annotations
    ("Add Class Annotation", "ACA", OTHERS, False),
    ("Modify Class Annotation", "MCA", OTHERS, False),
    ("Remove Class Annotation", "RCA", OTHERS, False),
    ("Add Attribute Annotation", "AAA", OTHERS, False),
    ("Modify Attribute Annotation", "MAA", OTHERS, False),
    ("Remove Attribute Annotation", "RAA", OTHERS, False),
    ("Add Method Annotation", "AMA", OTHERS, False),
    ("Modify Method Annotation", "MMA", OTHERS, False),
    ("Remove Method Annotation", "RMA", OTHERS, False),
    ("Add Parameter Annotation", "APA", OTHERS, False),
    ("Modify Parameter Annotation", "MPA", OTHERS, False),
    ("Remove Parameter Annotation", "RPA", OTHERS, False),
    ("Add Variable Annotation", "AVA", OTHERS, False),
    ("Modify Variable Annotation", "MVA", OTHERS, False),
    ("Remove Variable Annotation", "RVA", OTHERS, False),
    # Others: thrown exception types
    ("Add Thrown Exception Type", "ATET", OTHERS, False),
    ("Change Thrown Exception Type", "CTET", OTHERS, False),
    ("Remove Thrown Exception Type", "RTET", OTHERS, False),
    # Others: composite moves
    ("Move And Rename Attribute", "MARA", OTHERS, False),
    ("Move And Inline Method", "MAIM", OTHERS, False),
    ("Move And Rename Class", "MARC", OTHERS, False),
    ("Move And Rename Method", "MARM", OTHERS, False),
    ("Extract And Move Method", "EAMM", OTHERS, False),
    # Others: miscellaneous
    ("Move Source Folder", "MSF", OTHERS, False),
    ("Try With Resources", "TWR", OTHERS, False),
    ("Invert Condition", "IC", OTHERS, False),
    ("Collapse Hierarchy", "CH", OTHERS, False),
]

CATALOGUE: tuple[RefactoringType, ...] = tuple(
    RefactoringType(name, abbr, group, ref) for name, abbr, group, ref in _CATALOGUE
)

BY_NAME: dict[str, RefactoringType] = {rt.name: rt for rt in CATALOGUE}
BY_ABBREVIATION: dict[str, RefactoringType] = {rt.abbreviation: rt for rt in CATALOGUE}

REFERENCE_STUDY_TYPES: tuple[RefactoringType, ...] = tuple(
    rt for rt in CATALOGUE if rt.in_reference_study
)


def lookup(name: str) -> RefactoringType | None:
    """Resolve a canonical type name; returns None for unknown strings."""
    return BY_NAME.get(name)
