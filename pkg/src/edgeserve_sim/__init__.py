"""Edge caching and inference simulator for pretrained foundation models."""

from .catalog import (AccuracyModel, ModelProfile, TaskProfile, accuracy_at, builtin_catalog,
                      calibrate_accuracy, load_catalog, memory_footprint, write_catalog)
from .context import AoCConfig, ContextStore, age_utility, effective_context, record_example
from .edgecache import CacheState, EdgeServerConfig
from .kernels import BACKEND as KERNEL_BACKEND
from .policy import PolicyKind, decide, select_victims
from .simcost import CostWeights, RunMetrics, SimOptions, run_simulation
from .workload import Request, WorkloadConfig, generate_trace, read_trace, write_trace

__version__ = "0.1.0"
