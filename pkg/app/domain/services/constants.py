# Constants shared by the execution and verification services.

# Reachability progress is logged every this many explored nodes
PROGRESS_EVERY = 100_000

# Smallest population a predicate is evaluated on (a step needs two agents)
MIN_POPULATION = 2

# Verifier check ids
CHECK_COMPLETENESS = "completeness"
CHECK_SOUNDNESS = "soundness"
CHECK_IO = "io"
CHECK_STABILITY = "stability"
CHECK_OBSERVATIONS = "observations"
CHECK_PREDICATE = "predicate"
CHECK_DEADLOCKS = "deadlocks"     # terminal configurations correspond
CHECK_SMOKE = "smoke"             # seeded random runs reach the predicate's consensus

# Default `--checks` list, in report order
DEFAULT_CHECKS = (
    CHECK_COMPLETENESS,
    CHECK_SOUNDNESS,
    CHECK_IO,
    CHECK_STABILITY,
    CHECK_OBSERVATIONS,
    CHECK_PREDICATE,
)

# Everything `verify` understands
ALL_CHECKS = DEFAULT_CHECKS + (CHECK_DEADLOCKS, CHECK_SMOKE)

# Smoke runs
SMOKE_RUNS = 100
SMOKE_POPULATION = 5

# Length of each random compiled run checked by trace projection
PROJECTION_MAX_STEPS = 200
