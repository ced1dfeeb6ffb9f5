"""Bundled theories: abelian groups, pure AC, and abelian groups with constructors."""

from __future__ import annotations

from .rewrite import Theory, parse_theory

AG_TEXT = """\
theory ag
ac + inverse i neutral 0
saturation group
rule i(?x + ?y) -> i(?y) + i(?x)
rule ?x + 0 -> ?x
rule ?x + i(?x) -> 0
rule i(i(?x)) -> ?x
rule i(0) -> 0
"""

PURE_AC_TEXT = """\
theory pure-ac
ac +
"""

BLIND_CTORS = """\
ctor pub/1
ctor sign/2
ctor blind/2
ctor enc/2
ctor pair/2
"""

AG_BLIND_TEXT = AG_TEXT.replace("theory ag", "theory ag+blind") + BLIND_CTORS

PRESETS = {
    "ag": AG_TEXT,
    "pure-ac": PURE_AC_TEXT,
    "ag+blind": AG_BLIND_TEXT,
}


def load_preset(name: str) -> Theory:
    try:
        text = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return parse_theory(text)


def ag() -> Theory:
    return load_preset("ag")


def pure_ac() -> Theory:
    return load_preset("pure-ac")


def ag_blind() -> Theory:
    return load_preset("ag+blind")
