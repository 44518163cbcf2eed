"""Model registry, experiment configs, runner and command line."""

from felab.harness.config import ConfigError, load_config, validate
from felab.harness.registry import REGISTRY, build_law, get_model, list_models
from felab.harness.runner import run, sweep
