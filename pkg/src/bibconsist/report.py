"""Critical-difference diagram as standalone SVG."""
from __future__ import annotations

from html import escape

from .stats import RankingResult

WIDTH = 640
MARGIN = 60


def cd_diagram_svg(result: RankingResult, title: str = "") -> str:
    """Mean-rank axis (rank 1 on the left), a CD bar, and one bold line per
    group of databases that are not significantly different."""
    n = len(result.databases)
    lo, hi = 1.0, float(max(n, 2))

    def x(rank):
        return MARGIN + (rank - lo) / (hi - lo) * (WIDTH - 2 * MARGIN)

    order = sorted(range(n), key=lambda i: (result.mean_ranks[i], i))
    axis_y = 70
    label_y0 = axis_y + 30 + 14 * len(result.groups)
    height = label_y0 + 20 * n + 20
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
           f'font-family="sans-serif" font-size="12">']
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="16" text-anchor="middle">{escape(title)}</text>')

    cd = result.critical_difference
    out.append(f'<line x1="{x(lo):.2f}" y1="34" x2="{x(min(lo + cd, hi)):.2f}" y2="34" '
               'stroke="black" stroke-width="2"/>')
    out.append(f'<text x="{x(lo):.2f}" y="28">CD = {cd:.3f}</text>')

    out.append(f'<line x1="{x(lo):.2f}" y1="{axis_y}" x2="{x(hi):.2f}" y2="{axis_y}" stroke="black"/>')
    for r in range(int(lo), int(hi) + 1):
        out.append(f'<line x1="{x(r):.2f}" y1="{axis_y - 5}" x2="{x(r):.2f}" y2="{axis_y}" stroke="black"/>')
        out.append(f'<text x="{x(r):.2f}" y="{axis_y - 8}" text-anchor="middle">{r}</text>')

    for g, group in enumerate(result.groups):
        if len(group) < 2:
            continue
        ranks = [result.mean_ranks[result.databases.index(d)] for d in group]
        y = axis_y + 12 + 14 * g
        out.append(f'<line x1="{x(min(ranks)) - 3:.2f}" y1="{y}" x2="{x(max(ranks)) + 3:.2f}" '
                   f'y2="{y}" stroke="black" stroke-width="4"/>')

    for row, i in enumerate(order):
        r = result.mean_ranks[i]
        y = label_y0 + 20 * row
        left = row < (n + 1) // 2
        end = MARGIN - 10 if left else WIDTH - MARGIN + 10
        anchor = "end" if left else "start"
        out.append(f'<polyline points="{x(r):.2f},{axis_y} {x(r):.2f},{y} {end:.2f},{y}" '
                   'fill="none" stroke="gray"/>')
        out.append(f'<text x="{end - 4 if left else end + 4:.2f}" y="{y + 4}" text-anchor="{anchor}">'
                   f'{escape(result.databases[i])} ({r:.2f})</text>')
    if not result.friedman_significant:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="{height - 6}" text-anchor="middle">'
                   'no significant inconsistencies</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
