import sys
from pathlib import Path

from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "repo", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

TWO_COLOURING = """
input E/2;
exists X/1;
forbid E(x,y), X(x), X(y);
forbid E(x,y), !X(x), !X(y);
"""

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
