from .campaign import CampaignResult, generate_pool, generate_pools, run_campaign
from .config import ConfigError, ExperimentConfig, NoiseSettings, Sweep
from .outputs import emit_outputs

__all__ = [
    "CampaignResult", "ConfigError", "ExperimentConfig", "NoiseSettings", "Sweep",
    "emit_outputs", "generate_pool", "generate_pools", "run_campaign",
]
