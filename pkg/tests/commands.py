"""Which command each shipped example config is meant for."""

COMMAND = {
    "example-3-odd-line": "deform",
    "example-4-bracket": "bracket-table",
    "example-4-cohomology": "cohomology",
    "example-6-bracket": "bracket-table",
    "example-6-pipeline": "transport",
    "example-6-psi1": "deform",
    "example-6-swap": "transport",
    "example-6-zero": "deform",
    "example-7-psi1e": "deform",
    "example-7-psi2e": "deform",
    "example-7-psi3e": "deform",
    "example-7-psi3f": "cohomology",
    "example-7-psi4e": "deform",
}
