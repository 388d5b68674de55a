"""Conversation templates with {placeholder} substitution."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from caris.errors import MissingVar

_PLACEHOLDER = re.compile(r"\{(\w+)\}")


@dataclass(frozen=True)
class Template:
    template_id: str
    body: str
    required_vars: tuple[str, ...] = field(default_factory=tuple)


def placeholders(body: str) -> set[str]:
    return set(_PLACEHOLDER.findall(body))


def render_template(template: Template, vars: dict[str, object]) -> str:
    """Substitute placeholders; extra vars are ignored, unbound ones fail."""
    needed = placeholders(template.body) | set(template.required_vars)
    missing = needed - set(vars)
    if missing:
        raise MissingVar(missing)
    return _PLACEHOLDER.sub(lambda m: str(vars[m.group(1)]), template.body)
