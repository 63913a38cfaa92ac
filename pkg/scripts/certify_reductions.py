"""Seeded certification sweep over every reduction; writes one report per reduction."""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field
from pathlib import Path

from snpforge.harness import REDUCTIONS, TrialConfig, certify


@dataclass
class SweepConfig:
    seed: int = 0
    trials: int = 200
    reductions: tuple[str, ...] = REDUCTIONS
    out_dir: Path = Path("runs/certify")
    trial: TrialConfig = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.trial is None:
            self.trial = TrialConfig(seed=self.seed, trials=self.trials)


def run(cfg: SweepConfig) -> bool:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    ok = True
    for name in cfg.reductions:
        start = time.monotonic()
        report = certify(name, cfg.trial)
        (cfg.out_dir / f"{name}.txt").write_text(report.render())
        ok &= report.passed
        print(f"{name:18s} agree={report.agree:5d} disagree={report.disagree} "
              f"budget={report.budget_exceeded} {time.monotonic() - start:6.1f}s")
    return ok


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--out", type=Path, default=Path("runs/certify"))
    p.add_argument("--only", nargs="*", choices=REDUCTIONS)
    a = p.parse_args()
    cfg = SweepConfig(seed=a.seed, trials=a.trials, out_dir=a.out, reductions=tuple(a.only or REDUCTIONS))
    return 0 if run(cfg) else 1


if __name__ == "__main__":
    raise SystemExit(main())
