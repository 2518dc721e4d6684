"""Taxonomy invariants and RefactoringMiner JSON ingestion."""

from __future__ import annotations

import json
from collections import Counter
from pathlib import Path

import pytest

from refwhy.errors import MalformedJson, UnknownRefactoringType
from refwhy.rminer import (
    frequency_table,
    instance_from_json,
    instance_to_json,
    join_to_commits,
    parse_rm_json,
    read_instances_ndjson,
    write_instances_ndjson,
)
from refwhy.taxonomy import BY_ABBREVIATION, BY_NAME, CATALOGUE, GROUPS, REFERENCE_STUDY_TYPES

FIXTURES = Path(__file__).parent / "fixtures"
RM_FIXTURE = FIXTURES / "rm_output.json"

# (sha1 prefix, type) multiset read off the fixture file by hand.
EXPECTED_FIXTURE_TYPES = Counter(
    {
        ("a1b2c3d4", "Extract Method"): 2,
        ("a1b2c3d4", "Move Class"): 1,
        ("b2c3d4e5", "Rename Method"): 1,
        ("b2c3d4e5", "Inline Method"): 1,
        ("b2c3d4e5", "Move Attribute"): 1,
        ("b2c3d4e5", "Extract Method"): 1,
        ("d4e5f607", "Pull Up Method"): 1,
        ("d4e5f607", "Extract Interface"): 1,
        ("e5f60718", "Rename Variable"): 2,
        ("e5f60718", "Change Variable Type"): 1,
        ("e5f60718", "Add Parameter"): 1,
        ("e5f60718", "Extract Superclass"): 1,
        ("f6071829", "Move Method"): 1,
        ("f6071829", "Rename Package"): 1,
        ("f6071829", "Push Down Attribute"): 1,
    }
)


class TestTaxonomy:
    def test_exactly_103_canonical_entries(self):
        assert len(CATALOGUE) == 103
        assert len(BY_NAME) == 103

    def test_abbreviations_unique(self):
        assert len(BY_ABBREVIATION) == 103

    def test_twelve_reference_study_types(self):
        assert len(REFERENCE_STUDY_TYPES) == 12
        assert {rt.abbreviation for rt in REFERENCE_STUDY_TYPES} == {
            "EM", "MovC", "MA", "RPack", "MM", "IM",
            "PUM", "PUA", "ESup", "PDM", "PDA", "EI",
        }

    def test_every_type_in_one_of_ten_groups(self):
        assert {rt.group for rt in CATALOGUE} == set(GROUPS)
        assert len(GROUPS) == 10


class TestParseRmJson:
    def test_empty_commits_array(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text('{"commits": []}')
        assert parse_rm_json(path) == []

    def test_fixture_multiset_matches_manifest(self):
        instances = parse_rm_json(RM_FIXTURE, project="demo")
        assert len(instances) == 17
        got = Counter((inst.commit_id[:8], inst.type.name) for inst in instances)
        assert got == EXPECTED_FIXTURE_TYPES

    def test_commits_without_refactorings_discarded(self):
        instances = parse_rm_json(RM_FIXTURE)
        assert len({inst.commit_id for inst in instances}) == 5

    def test_unknown_type_rejected_not_coerced(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({
            "commits": [{
                "sha1": "feedc0de",
                "refactorings": [{"type": "Extracted Method", "description": "",
                                  "leftSideLocations": [], "rightSideLocations": []}],
            }]
        }))
        with pytest.raises(UnknownRefactoringType) as err:
            parse_rm_json(path)
        assert "Extracted Method" in str(err.value)
        assert "feedc0de" in str(err.value)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(MalformedJson):
            parse_rm_json(path)
        path.write_text('{"something": []}')
        with pytest.raises(MalformedJson):
            parse_rm_json(path)

    def test_locations_carry_both_sides(self):
        instances = parse_rm_json(RM_FIXTURE)
        extract = next(i for i in instances if i.type.name == "Extract Superclass")
        sides = Counter(loc.side for loc in extract.locations)
        assert sides == {"left": 2, "right": 1}
        assert all(loc.file_path for loc in extract.locations)


class TestFrequencyTable:
    def test_empty_is_all_zero(self):
        table = frequency_table([])
        assert len(table) == 103
        assert set(table.values()) == {0}

    def test_fixture_counts(self):
        instances = parse_rm_json(RM_FIXTURE)
        table = frequency_table(instances)
        assert table["Extract Method"] == 3
        assert table["Rename Variable"] == 2
        assert table["Collapse Hierarchy"] == 0
        assert sum(table.values()) == 17

    def test_duplicates_preserved(self):
        instances = parse_rm_json(RM_FIXTURE)
        doubled = instances + instances
        assert sum(frequency_table(doubled).values()) == 34


class TestRoundTripAndJoin:
    def test_parse_serialize_parse_identity(self, tmp_path):
        instances = parse_rm_json(RM_FIXTURE, project="demo")
        path = tmp_path / "instances.ndjson"
        write_instances_ndjson(instances, path)
        restored = read_instances_ndjson(path)
        assert [instance_to_json(i) for i in restored] == [
            instance_to_json(i) for i in instances
        ]

    def test_round_trip_single(self):
        instances = parse_rm_json(RM_FIXTURE)
        line = instance_to_json(instances[0])
        assert instance_to_json(instance_from_json(line)) == line

    def test_join_reports_failures(self, caplog):
        instances = parse_rm_json(RM_FIXTURE)
        known = {"a1b2c3d4e5f60718293a4b5c6d7e8f9012345601"}
        with caplog.at_level("WARNING"):
            joined, unjoined = join_to_commits(instances, known)
        assert len(joined) == 3
        assert len(unjoined) == 14
        assert "did not join" in caplog.text
