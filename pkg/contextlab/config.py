"""
ContextLab Configuration

All tunable limits loaded from environment variables (prefix CONTEXTLAB_).
"""
from typing import Optional
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="CONTEXTLAB_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )

    # ==========================================================================
    # Solver limits
    # ==========================================================================
    MAX_LP_VARS: int = 2 ** 20       # refuse larger global-distribution LPs
    MAX_INCIDENCES: int = 20         # (observable, context) pairs for decide_c
    MAX_ORACLE_VARS: int = 16        # brute-force vertex enumeration budget

    # ==========================================================================
    # Search
    # ==========================================================================
    SEED: Optional[int] = None       # overrides every search config seed
    SEARCH_WORKERS: int = 1
    DEFAULT_DENOMINATOR: int = 4

    # ==========================================================================
    # HTTP service
    # ==========================================================================
    HOST: str = "0.0.0.0"
    PORT: int = 8000

    # ==========================================================================
    # Logging
    # ==========================================================================
    LOG_LEVEL: str = "INFO"


# ==========================================================================
# Registries
# ==========================================================================
THEORIES = {
    "ks": {
        "label": "Kochen-Specker",
        "description": "Global distribution over all observables (nondisturbing only)",
    },
    "cbd2": {
        "label": "CbD 2.0",
        "description": "Multimaximal coupling criterion over incidence pairs (binary only)",
    },
    "strict": {
        "label": "Strict",
        "description": "Disturbing behaviors count as contextual; KS otherwise",
    },
}

# Transform families understood by the principle checker and the search
PRINCIPLE_FAMILIES = {
    "nestedness": "nest",
    "coarse-graining": "coarse_grain",
    "post-processing": "post_process",
}

# Named deterministic post-processing functions
POST_PROCESS_FUNCTIONS = ["product", "parity"]

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def get_family_for_principle(principle: str) -> str:
    """Get the transform kind a principle is built on."""
    if principle in PRINCIPLE_FAMILIES:
        return PRINCIPLE_FAMILIES[principle]
    raise ValueError(f"Unknown principle: {principle}")


def get_principle_for_family(kind: str) -> str:
    """Inverse of get_family_for_principle."""
    for principle, family in PRINCIPLE_FAMILIES.items():
        if family == kind:
            return principle
    raise ValueError(f"Transform kind has no principle: {kind}")


# Global settings instance
settings = Settings()
