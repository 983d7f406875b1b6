"""
Configuration settings for the linfty-lab toolkit.
"""

import os
from typing import Dict

# Try to load environment variables from .env file if python-dotenv is available
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    # If python-dotenv is not installed, just use system environment variables
    pass


FORMAT_VERSION = "linfty-lab/1"


class Settings:
    """Configuration settings."""

    # Worker pool cap for per-word checks
    THREADS = max(1, int(os.getenv("LINFTY_LAB_THREADS", "1")))

    # Word-length cutoff used when a manifest does not give one
    DEFAULT_CUTOFF = int(os.getenv("LINFTY_LAB_CUTOFF", "6"))

    # Seed for randomized suites (gauge samples, lift perturbations)
    SEED = int(os.getenv("LINFTY_LAB_SEED", "0"))

    # Coefficient bound of the bounded structure-constant searches
    SEARCH_BOUND = int(os.getenv("LINFTY_LAB_SEARCH_BOUND", "1"))

    # Candidate cap of the hat search; 0 means no cap
    SEARCH_MAX_CANDIDATES = int(os.getenv("LINFTY_LAB_SEARCH_MAX_CANDIDATES", "100000"))

    # Output settings
    OUTPUT_FORMAT = os.getenv("LINFTY_LAB_OUTPUT", "json")  # json, text
    LOG_LEVEL = os.getenv("LINFTY_LAB_LOG_LEVEL", "WARNING").upper()

    @classmethod
    def to_dict(cls) -> Dict:
        """Convert settings to dictionary."""
        return {
            "threads": cls.THREADS,
            "default_cutoff": cls.DEFAULT_CUTOFF,
            "seed": cls.SEED,
            "search_bound": cls.SEARCH_BOUND,
            "search_max_candidates": cls.SEARCH_MAX_CANDIDATES,
            "output_format": cls.OUTPUT_FORMAT,
            "log_level": cls.LOG_LEVEL,
        }


# Create settings instance
settings = Settings()
