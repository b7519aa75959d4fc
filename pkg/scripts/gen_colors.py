"""Regenerate frontend/src/colors.ts from the Python fill-colour table.

The viewer must paint nodes with exactly the colours the SVG exporter
uses, so the TypeScript constants are generated from the one table in
oignon.export rather than maintained by hand.
"""

from __future__ import annotations

from pathlib import Path

from oignon.export import COLORS

TARGET = Path(__file__).resolve().parent.parent / "frontend" / "src" / "colors.ts"


def main() -> None:
    lines = [
        "// Generated by scripts/gen_colors.py from the server's fill table.",
        "// Do not edit by hand; regenerate instead.",
        "",
        "export const FILL_COLORS = {",
    ]
    for token, value in COLORS.items():
        lines.append(f'  "{token}": "{value}",')
    lines.append("} as const;")
    lines.append("")
    lines.append("export type FillToken = keyof typeof FILL_COLORS;")
    lines.append("")
    TARGET.parent.mkdir(parents=True, exist_ok=True)
    TARGET.write_text("\n".join(lines), encoding="utf-8")
    print(f"wrote {TARGET}")


if __name__ == "__main__":
    main()
