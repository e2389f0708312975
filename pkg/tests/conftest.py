import sys
from pathlib import Path

from hypothesis import HealthCheck, settings

# oracles.py holds the printed closed forms used as independent references
sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")
