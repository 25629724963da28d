"""GraphViz rendering of architectures as labeled digraphs.

Components become boxes, the environment an ellipse, and every
writer-to-reader channel becomes a labeled edge.  Output is deterministic:
nodes and edges are emitted in sorted order.
"""

from __future__ import annotations

from .model import System, assert_consistent

_ENV = "environment"


def _quote(name: str) -> str:
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def render_dot(system: System) -> str:
    assert_consistent(system)
    lines = [
        f"digraph {_quote(system.name)} {{",
        "  rankdir=LR;",
        f"  {_quote(_ENV)} [shape=ellipse];",
    ]
    for name in sorted(component.name for component in system.components):
        lines.append(f"  {_quote(name)} [shape=box];")

    edges: set[tuple[str, str, str]] = set()
    for channel in sorted(system.channels):
        writer = system.writer(channel)
        source = writer.name if writer is not None else _ENV
        for reader in system.readers(channel):
            edges.add((source, reader.name, channel))
        if channel in system.outputs:
            edges.add((source, _ENV, channel))
    for source, target, channel in sorted(edges):
        lines.append(
            f"  {_quote(source)} -> {_quote(target)} [label={_quote(channel)}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
