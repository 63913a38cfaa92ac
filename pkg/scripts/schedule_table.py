"""Tabulate the sweep schedule of compiled machines against the closed-form move count."""

from __future__ import annotations

from dataclasses import dataclass

from snpforge.embedding import grid_size
from snpforge.turing import StepPolynomial, g_moves, schedule_moves


@dataclass(frozen=True)
class TableConfig:
    lengths: tuple[int, ...] = (1, 2, 3, 4, 5)
    bound: str = "0,1"  # step polynomial coefficients


def table(cfg: TableConfig) -> list[str]:
    f = StepPolynomial.parse(cfg.bound, zero_allowed=True)
    rows = [f"{'n':>3} {'f(n)':>5} {'schedule':>9} {'g(n)':>6} {'grid':>7}"]
    for n in cfg.lengths:
        fv = f(n)
        rows.append(f"{n:>3} {fv:>5} {schedule_moves(n, fv):>9} {g_moves(n, fv).moves:>6} {grid_size(n, fv):>7}")
    return rows


if __name__ == "__main__":
    print("\n".join(table(TableConfig())))
