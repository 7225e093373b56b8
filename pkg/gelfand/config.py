import os


class Settings:
    # Numerical tolerances
    ABS_EPS: float = float(os.getenv("GELFAND_ABS_EPS", "1e-9"))
    REL_EPS: float = float(os.getenv("GELFAND_REL_EPS", "1e-9"))
    # Looser budget for anything that went through two diagonalizations
    MATCH_TOL: float = float(os.getenv("GELFAND_MATCH_TOL", "1e-6"))
    POSITIVITY_EPS: float = float(os.getenv("GELFAND_POSITIVITY_EPS", "1e-7"))

    MAX_SWEEPS: int = int(os.getenv("GELFAND_MAX_SWEEPS", "100"))
    MAX_OBJECTS: int = int(os.getenv("GELFAND_MAX_OBJECTS", "8"))
    DIAG_SEED: int = int(os.getenv("GELFAND_DIAG_SEED", "20240917"))

    LOG_LEVEL: str = os.getenv("GELFAND_LOG_LEVEL", "WARNING")


settings = Settings()
