from prometheus_client import Counter, Histogram

command_runs = Counter("magfib_command_runs_total", "Commands executed by outcome", ["command", "outcome"])
command_latency = Histogram("magfib_command_latency_seconds", "Wall time of command execution", ["command"])
complexes_built = Counter("magfib_levels_computed_total", "Length levels computed", ["command"])
