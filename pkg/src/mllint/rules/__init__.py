"""Built-in rules, grouped by category in registry order."""

from . import ci, code_quality, dependencies, testing, version_control

BUILTIN_RULES = (
    *version_control.RULES,
    *dependencies.RULES,
    *ci.RULES,
    *code_quality.RULES,
    *testing.RULES,
)
