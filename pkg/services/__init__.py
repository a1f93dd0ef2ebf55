from .sweep_service import SeedSweepService

__all__ = [
    "SeedSweepService",
]
