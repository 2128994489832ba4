import os

from hypothesis import HealthCheck, settings

settings.register_profile("padrao", max_examples=30, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("rapido", max_examples=5, deadline=None)
settings.register_profile("completo", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "padrao"))
