"""
Dependency injection container
"""

from pathlib import Path
from typing import Any, Dict, Optional, Union

import structlog

from infrastructure.config import Settings
from infrastructure.repositories.scenario_repository import ScenarioRepository
from infrastructure.repositories.table_repository import TableRepository
from infrastructure.repositories.timestamp_repository import TimestampRepository
from infrastructure.workers.pool import WorkerPool
from usecase.build_traces import BuildTracesInteractor
from usecase.compute_shadow import ComputeShadowInteractor
from usecase.evaluate_network import EvaluateNetworkInteractor
from usecase.run_static_scenario import RunStaticScenarioInteractor
from usecase.sweep_separation import SweepSeparationInteractor

logger = structlog.get_logger(__name__)


class Container:
    def __init__(self, settings: Optional[Settings] = None):
        self._settings = settings
        self._instances: Dict[str, Any] = {}
        self._initialized = False

    def initialize(self):
        """Initialize all services"""
        if self._initialized:
            return
        settings = self._settings or Settings()
        self._instances["settings"] = settings

        # Core services
        self._instances["worker_pool"] = WorkerPool(n_jobs=settings.QCS_THREADS)
        self._instances["scenario_repository"] = ScenarioRepository(settings.SCENARIO_DIR)

        # Use cases
        pool = self._instances["worker_pool"]
        traces = BuildTracesInteractor(pool)
        self._instances["build_traces"] = traces
        self._instances["evaluate_network"] = EvaluateNetworkInteractor(traces)
        self._instances["compute_shadow"] = ComputeShadowInteractor()
        self._instances["sweep_separation"] = SweepSeparationInteractor(pool)
        self._instances["run_static"] = RunStaticScenarioInteractor(pool)

        self._initialized = True
        logger.debug("container_initialized", threads=settings.QCS_THREADS)

    def _get(self, key: str) -> Any:
        self.initialize()
        return self._instances[key]

    # Core service getters
    def get_settings(self) -> Settings:
        return self._get("settings")

    def get_worker_pool(self) -> WorkerPool:
        return self._get("worker_pool")

    # Repository getters
    def get_scenario_repository(self) -> ScenarioRepository:
        return self._get("scenario_repository")

    def get_table_repository(self, directory: Union[str, Path], formats=("csv",)) -> TableRepository:
        return TableRepository(directory, formats)

    def get_timestamp_repository(self, directory: Union[str, Path]) -> TimestampRepository:
        return TimestampRepository(directory)

    # Use case getters
    def get_build_traces(self) -> BuildTracesInteractor:
        return self._get("build_traces")

    def get_evaluate_network(self) -> EvaluateNetworkInteractor:
        return self._get("evaluate_network")

    def get_compute_shadow(self) -> ComputeShadowInteractor:
        return self._get("compute_shadow")

    def get_sweep_separation(self) -> SweepSeparationInteractor:
        return self._get("sweep_separation")

    def get_run_static(self) -> RunStaticScenarioInteractor:
        return self._get("run_static")


