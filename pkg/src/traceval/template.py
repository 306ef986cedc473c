"""Template rendering with ``@tag@`` placeholders plus the settings format.

A tag is one or more ASCII letters or underscores between ``@`` symbols;
``@@`` escapes a literal ``@``.  Substitution is a single pass over the
template: replacement text is never re-scanned.  Tags resolve from the
bindings first, then the settings parameters, then the settings defaults.

The settings format is a restricted two-map subset of YAML: the top-level
keys ``parameters:`` and ``defaults:``, each holding flat ``key: value``
entries with scalar values; ``#`` starts a comment.  Anything deeper or
fancier is rejected.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Mapping

from .errors import ParseError, TemplateError

_TAG_CHARS = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_TAG_RE = re.compile(r"[A-Za-z_]+\Z")
_INT_RE = re.compile(r"-?\d+\Z")


@dataclass
class Settings:
    """Scalar parameters plus default tag values."""

    parameters: dict[str, int | str] = field(default_factory=dict)
    defaults: dict[str, str] = field(default_factory=dict)


def is_tag_name(name: str) -> bool:
    return bool(_TAG_RE.match(name))


def _line_col(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def render(
    template: str,
    bindings: Mapping[str, str] | None = None,
    settings: Settings | None = None,
    *,
    validate: bool = True,
) -> str:
    """Substitute every tag in ``template`` and return the rendered text.

    With ``validate`` (the default) the result must parse as a model;
    parse failures are reported as :class:`TemplateError` and name the tag
    whose substituted text contains the offending position.
    """
    bindings = bindings or {}
    settings = settings or Settings()
    out: list[str] = []
    spans: list[tuple[int, int, str]] = []  # offsets into rendered text
    out_len = 0
    i = 0
    n = len(template)
    while i < n:
        ch = template[i]
        if ch != "@":
            out.append(ch)
            out_len += 1
            i += 1
            continue
        if i + 1 < n and template[i + 1] == "@":
            out.append("@")
            out_len += 1
            i += 2
            continue
        j = i + 1
        while j < n and template[j] in _TAG_CHARS:
            j += 1
        name = template[i + 1 : j]
        if not name or j >= n or template[j] != "@":
            line, col = _line_col(template, i)
            raise TemplateError(f"malformed tag at {line}:{col}")
        if name in bindings:
            value = bindings[name]
        elif name in settings.parameters:
            value = str(settings.parameters[name])
        elif name in settings.defaults:
            value = settings.defaults[name]
        else:
            line, col = _line_col(template, i)
            raise TemplateError(f"unresolved tag '{name}' at {line}:{col}")
        out.append(value)
        spans.append((out_len, out_len + len(value), name))
        out_len += len(value)
        i = j + 1
    rendered = "".join(out)

    if validate:
        from .lang import parse_model

        try:
            parse_model(rendered)
        except ParseError as exc:
            detail = str(exc)
            if exc.line is not None:
                offset = _offset_of(rendered, exc.line, exc.col)
                blame = None
                for start, end, name in spans:
                    if start > offset:
                        break
                    # inside the substituted text, or just after it on the
                    # same line (bad fragments often break the next token)
                    if offset < end or "\n" not in rendered[end:offset]:
                        blame = name
                if blame is not None:
                    detail += f" (near text substituted for tag '{blame}')"
            raise TemplateError(f"rendered model fails to parse: {detail}") from exc
    return rendered


def _offset_of(text: str, line: int, col: int) -> int:
    offset = 0
    for _ in range(line - 1):
        nl = text.find("\n", offset)
        if nl < 0:
            break
        offset = nl + 1
    return offset + col - 1


# ---------------------------------------------------------------------------
# Settings
# ---------------------------------------------------------------------------

_SECTIONS = ("parameters", "defaults")


def _strip_comment(line: str) -> str:
    quote = None
    for i, ch in enumerate(line):
        if quote:
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
        elif ch == "#":
            return line[:i]
    return line


def _scalar(raw: str):
    value = raw.strip()
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
        return value[1:-1]
    if _INT_RE.match(value):
        return int(value)
    if value == "":
        return None
    return value


def parse_settings(text: str) -> Settings:
    """Parse settings text; missing sections mean empty maps."""
    settings = Settings()
    seen: set[str] = set()
    section: str | None = None
    pending_key: tuple[int, int] | None = None  # (line_no, indent) of a value-less entry
    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = _strip_comment(raw.rstrip())
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        if pending_key is not None:
            if indent > pending_key[1]:
                raise ParseError("nesting too deep", line_no, indent + 1)
            raise ParseError("missing value", pending_key[0], pending_key[1] + 1)
        body = line.strip()
        if ":" not in body:
            raise ParseError("expected 'key: value'", line_no, indent + 1)
        key, _, rest = body.partition(":")
        key = key.strip()
        if indent == 0:
            if rest.strip():
                raise ParseError(
                    f"top-level key '{key}' must open a section", line_no, 1
                )
            if key not in _SECTIONS:
                raise ParseError(
                    f"unknown section '{key}' (expected one of {', '.join(_SECTIONS)})",
                    line_no,
                    1,
                )
            if key in seen:
                raise ParseError(f"duplicate section '{key}'", line_no, 1)
            seen.add(key)
            section = key
            continue
        if section is None:
            raise ParseError("entry outside any section", line_no, indent + 1)
        if not is_tag_name(key):
            raise ParseError(
                f"'{key}' is not a valid tag identifier (letters and '_' only)",
                line_no,
                indent + 1,
            )
        target = getattr(settings, section)
        if key in target:
            raise ParseError(f"duplicate key '{key}'", line_no, indent + 1)
        value = _scalar(rest)
        if value is None:
            pending_key = (line_no, indent)
            continue
        if section == "defaults":
            value = str(value)
        target[key] = value
    if pending_key is not None:
        raise ParseError("missing value", pending_key[0], pending_key[1] + 1)
    return settings


def format_settings(settings: Settings) -> str:
    """Canonical settings text; round-trips through :func:`parse_settings`."""
    lines: list[str] = []
    if settings.parameters:
        lines.append("parameters:")
        for key, value in settings.parameters.items():
            lines.append(f"  {key}: {value if isinstance(value, int) else _quote(value)}")
    if settings.defaults:
        lines.append("defaults:")
        for key, value in settings.defaults.items():
            lines.append(f"  {key}: {_quote(value)}")
    return "\n".join(lines) + ("\n" if lines else "")


def _quote(value: str) -> str:
    return '"' + value.replace('"', "'") + '"'


def parse_bindings(text: str) -> dict[str, str]:
    """Parse a bindings file: one flat JSON object with string values."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TemplateError(f"bindings are not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise TemplateError("bindings must be a JSON object")
    for key, value in data.items():
        if not is_tag_name(key):
            raise TemplateError(f"binding key '{key}' is not a valid tag identifier")
        if not isinstance(value, str):
            raise TemplateError(f"binding '{key}' must be a string")
    return dict(data)


def format_bindings(bindings: Mapping[str, str]) -> str:
    return json.dumps(dict(bindings), indent=2) + "\n"
