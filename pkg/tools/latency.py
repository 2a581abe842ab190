import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Dict, List, Optional

logger = logging.getLogger(__name__)


@dataclass
class StageMeasurement:
    stage: str
    start_time: float
    end_time: Optional[float] = None
    duration_ms: Optional[float] = None
    metadata: Optional[Dict] = None


class StageTracker:
    """
    Wall-clock tracking of pipeline stages (load, pair, calibrate, optimize, ...)
    """
    def __init__(self, run_id: str):
        self.run_id = run_id
        self.measurements: List[StageMeasurement] = []
        self.active_measurements: Dict[str, StageMeasurement] = {}
        self.run_start = time.perf_counter()

    def start_measurement(self, stage: str, metadata: Dict = None) -> str:
        """Start timing a specific stage"""
        measurement_id = f"{stage}_{len(self.measurements) + len(self.active_measurements)}"
        self.active_measurements[measurement_id] = StageMeasurement(
            stage=stage,
            start_time=time.perf_counter(),
            metadata=metadata or {},
        )
        return measurement_id

    def end_measurement(self, measurement_id: str, metadata: Dict = None) -> Optional[float]:
        """End timing and calculate duration"""
        if measurement_id not in self.active_measurements:
            logger.warning("No active measurement found for %s", measurement_id)
            return None

        measurement = self.active_measurements.pop(measurement_id)
        measurement.end_time = time.perf_counter()
        measurement.duration_ms = (measurement.end_time - measurement.start_time) * 1000
        if metadata:
            measurement.metadata.update(metadata)
        self.measurements.append(measurement)
        logger.info("%s: %.1fms %s", measurement.stage, measurement.duration_ms, measurement.metadata)
        return measurement.duration_ms

    @contextmanager
    def measure(self, stage: str, metadata: Dict = None):
        measurement_id = self.start_measurement(stage, metadata)
        try:
            yield
        finally:
            self.end_measurement(measurement_id)

    def get_pipeline_summary(self) -> Dict:
        """Summary of all measurements grouped by stage"""
        if not self.measurements:
            return {"error": "No measurements recorded"}

        by_stage: Dict[str, List[float]] = {}
        for m in self.measurements:
            by_stage.setdefault(m.stage, []).append(m.duration_ms)

        summary = {}
        total = 0.0
        for stage, durations in by_stage.items():
            summary[stage] = {
                "total_ms": round(sum(durations), 1),
                "max_ms": round(max(durations), 1),
                "count": len(durations),
            }
            total += sum(durations)

        summary["total_pipeline_ms"] = round(total, 1)
        summary["run_duration_s"] = round(time.perf_counter() - self.run_start, 1)
        return summary

    def log_summary(self):
        summary = self.get_pipeline_summary()
        logger.info("Stage summary - run %s", self.run_id)
        if "error" in summary:
            logger.info(summary["error"])
            return

        for stage, stats in summary.items():
            if stage in ("total_pipeline_ms", "run_duration_s"):
                continue
            logger.info(
                "  %-12s total %9.1fms  max %9.1fms  count %d",
                stage, stats["total_ms"], stats["max_ms"], stats["count"],
            )
        logger.info("  pipeline total %.1fms, run %.1fs", summary["total_pipeline_ms"], summary["run_duration_s"])
