import pytest

from advisoryflow.records import Role
from advisoryflow.synth import role_population

#: Occurrence counts per role as observed in GitHub-reviewed advisories.
ROLE_OCCURRENCES = {
    Role.analyst: 5610,
    Role.reporter: 2086,
    Role.finder: 616,
    Role.remediation_developer: 602,
    Role.remediation_reviewer: 349,
    Role.coordinator: 236,
    Role.remediation_verifier: 51,
    Role.other: 31,
    Role.sponsor: 7,
    Role.tool: 3,
}

#: Users per role-set cardinality with the most frequent combinations.
SPECIALIZATION_ROWS = {
    1: (3521, []),
    2: (313, [
        (frozenset({Role.analyst, Role.reporter}), 98),
        (frozenset({Role.finder, Role.reporter}), 47),
        (frozenset({Role.remediation_reviewer, Role.remediation_developer}), 37),
    ]),
    3: (72, [
        (frozenset({Role.finder, Role.reporter, Role.analyst}), 26),
        (frozenset({Role.remediation_reviewer, Role.remediation_developer, Role.analyst}), 9),
        (frozenset({Role.remediation_developer, Role.coordinator, Role.analyst}), 5),
    ]),
    4: (19, [
        (frozenset({Role.remediation_developer, Role.remediation_reviewer,
                    Role.coordinator, Role.analyst}), 4),
        (frozenset({Role.reporter, Role.coordinator, Role.analyst,
                    Role.remediation_reviewer}), 2),
        (frozenset({Role.remediation_developer, Role.reporter,
                    Role.coordinator, Role.analyst}), 2),
    ]),
    5: (3, [
        (frozenset({Role.coordinator, Role.reporter, Role.remediation_reviewer,
                    Role.remediation_developer, Role.analyst}), 2),
        (frozenset({Role.coordinator, Role.reporter, Role.finder,
                    Role.remediation_developer, Role.analyst}), 1),
    ]),
}


@pytest.fixture(scope="session")
def population():
    return role_population(ROLE_OCCURRENCES, SPECIALIZATION_ROWS)
