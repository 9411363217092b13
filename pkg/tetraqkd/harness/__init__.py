from .experiments import RUNNERS, RunOutputs, run_mode, verify_contracts
from .runner import EXIT_CONFIG, EXIT_INVARIANT, EXIT_OK, run
from .sampling import SampleBatch, SampleRecord, sample_run, triple_distribution

__all__ = [
    "EXIT_CONFIG",
    "EXIT_INVARIANT",
    "EXIT_OK",
    "RUNNERS",
    "RunOutputs",
    "SampleBatch",
    "SampleRecord",
    "run",
    "run_mode",
    "sample_run",
    "triple_distribution",
    "verify_contracts",
]
