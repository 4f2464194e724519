import hypothesis

# Single-core CI box: generous deadlines, modest example counts.
hypothesis.settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[hypothesis.HealthCheck.too_slow],
)
hypothesis.settings.load_profile("default")
