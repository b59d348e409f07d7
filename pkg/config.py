import os
from fractions import Fraction

from dotenv import load_dotenv

load_dotenv()

_BASE_DIR = os.path.dirname(os.path.abspath(__file__))


class Config:
    # Logging
    LOG_LEVEL = os.getenv("HOM3LIE_LOG_LEVEL", "WARNING").upper()
    LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Randomized oracle trials
    RANDOM_SEED = int(os.getenv("HOM3LIE_RANDOM_SEED", "20240229"))
    RANDOM_TRIALS = int(os.getenv("HOM3LIE_RANDOM_TRIALS", "20"))

    # Fixtures and audit
    FIXTURES_DIR = os.getenv("HOM3LIE_FIXTURES_DIR", os.path.join(_BASE_DIR, "fixtures"))
    AUDIT_CLAIMS_FILE = os.getenv("HOM3LIE_AUDIT_CLAIMS_FILE", "example_claims.txt")
    # Per-parameter instantiation grid; zero is skipped for NONZERO parameters
    AUDIT_SAMPLE_VALUES = os.getenv("HOM3LIE_AUDIT_SAMPLE_VALUES", "1,2,3")
    AUDIT_MAX_SAMPLES = int(os.getenv("HOM3LIE_AUDIT_MAX_SAMPLES", "12"))

    # Cohomology solver limits (cohomological degree)
    MAX_ORDINARY_DEGREE = int(os.getenv("HOM3LIE_MAX_ORDINARY_DEGREE", "3"))
    MAX_GENERALIZED_DEGREE = int(os.getenv("HOM3LIE_MAX_GENERALIZED_DEGREE", "2"))
    # cocycle_space alone reaches one degree further on g⊕V
    MAX_GENERALIZED_COCYCLE_DEGREE = int(os.getenv("HOM3LIE_MAX_GENERALIZED_COCYCLE_DEGREE", "3"))

    # Output
    MAX_VIOLATIONS_SHOWN = int(os.getenv("HOM3LIE_MAX_VIOLATIONS_SHOWN", "10"))
    DEBUG = os.getenv("HOM3LIE_DEBUG", "false").lower() == "true"

    @classmethod
    def audit_sample_values(cls):
        """Parse AUDIT_SAMPLE_VALUES into a list of Fractions."""
        return [Fraction(token.strip()) for token in cls.AUDIT_SAMPLE_VALUES.split(",") if token.strip()]

    @classmethod
    def claims_path(cls) -> str:
        if os.path.isabs(cls.AUDIT_CLAIMS_FILE):
            return cls.AUDIT_CLAIMS_FILE
        return os.path.join(cls.FIXTURES_DIR, cls.AUDIT_CLAIMS_FILE)
