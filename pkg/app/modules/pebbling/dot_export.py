from __future__ import annotations

from pathlib import Path
from typing import List, Union

from .strategy import CertificateBundle, TreeStrategy, covering_bound


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def strategy_to_dot(s: TreeStrategy, title: str) -> str:
    lines = [
        f"digraph {_quote(title)} {{",
        "  rankdir=TB;",
        "  node [shape=ellipse];",
        f"  {_quote(s.root)} [label={_quote(s.root)}, style=filled, fillcolor=gold, shape=doublecircle];",
    ]
    for _, child, w in s.edges:
        label = child.replace('"', '\\"') + "\\n" + w.to_decimal_string()
        lines.append(f"  {_quote(child)} [label=\"{label}\"];")
    for parent, child, _ in s.edges:
        lines.append(f"  {_quote(parent)} -> {_quote(child)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def bundle_to_dot(bundle: CertificateBundle) -> List[str]:
    """One digraph per strategy. Refuses bundles that do not verify."""
    covering_bound(bundle)
    return [
        strategy_to_dot(s, f"{bundle.graph.name} root {bundle.root} tree {t}")
        for t, s in enumerate(bundle.strategies, start=1)
    ]


def write_dot_files(bundle: CertificateBundle, out_dir: Union[str, Path], stem: str = "tree") -> List[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for t, text in enumerate(bundle_to_dot(bundle), start=1):
        path = out_dir / f"{stem}_{t}.dot"
        path.write_text(text, encoding="utf-8")
        paths.append(path)
    return paths
