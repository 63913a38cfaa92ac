"""Run the acceptance suite and print only the ACCEPTANCE lines."""

from __future__ import annotations

import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


@dataclass(frozen=True)
class AcceptanceConfig:
    test_file: Path = ROOT / "tests" / "test_acceptance.py"
    select: str = ""  # pytest -k expression, e.g. "c5 or c6"
    log: Path | None = ROOT / "acceptance_output.txt"


def run(cfg: AcceptanceConfig) -> int:
    cmd = [sys.executable, "-m", "pytest", str(cfg.test_file), "-q", "-p", "no:cacheprovider"]
    if cfg.select:
        cmd += ["-k", cfg.select]
    proc = subprocess.run(cmd, cwd=ROOT, capture_output=True, text=True)
    lines = [l for l in proc.stdout.splitlines() if l.startswith("ACCEPTANCE ")]
    print("\n".join(lines))
    if cfg.log is not None:
        cfg.log.write_text(proc.stdout)
    return proc.returncode


if __name__ == "__main__":
    raise SystemExit(run(AcceptanceConfig(select=" ".join(sys.argv[1:]))))
