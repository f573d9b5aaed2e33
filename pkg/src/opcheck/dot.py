"""Graphviz export for finite categories.

    dot -Tpng -O category.gv
"""

from __future__ import annotations

from .fincat import FinCategory


def _quote(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(c: FinCategory, identities: bool = False) -> str:
    lines = [f"digraph {_quote(c.name or 'category')} {{", "\trankdir=LR;"]
    for x in c.objects:
        lines.append(f"\t{_quote(x)};")
    idents = set(c.identity.values())
    for a in c.arrows:
        if a in idents and not identities:
            continue
        lines.append(f"\t{_quote(c.source[a])} -> {_quote(c.target[a])} "
                     f"[label={_quote(a)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(c: FinCategory, path, identities: bool = False) -> None:
    with open(path, "w") as out:
        out.write(to_dot(c, identities))
