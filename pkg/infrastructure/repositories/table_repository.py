"""
Table Repository: result tables as CSV (canonical) with optional JSON mirrors
"""
from __future__ import annotations

from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Union

import pandas as pd
import structlog

logger = structlog.get_logger(__name__)

SUPPORTED_FORMATS = ("csv", "json")


class TableRepository:
    """
    Writes pandas tables under one output directory
    """

    def __init__(self, directory: Union[str, Path], formats: Sequence[str] = ("csv",)):
        unknown = set(formats) - set(SUPPORTED_FORMATS)
        if unknown:
            raise ValueError(f"Unsupported output formats: {sorted(unknown)}")
        self.directory = Path(directory)
        self.formats = tuple(formats) if "csv" in formats else ("csv", *formats)

    def save(self, name: str, table: Union[pd.DataFrame, Iterable[Dict[str, object]]]) -> List[Path]:
        """
        Save one table

        Args:
            name: file stem, may contain sub-directories
            table: DataFrame or list of row dicts

        Returns:
            Paths written, CSV first
        """
        frame = table if isinstance(table, pd.DataFrame) else pd.DataFrame(list(table))
        base = self.directory / name
        base.parent.mkdir(parents=True, exist_ok=True)

        written: List[Path] = []
        csv_path = base.with_suffix(".csv")
        frame.to_csv(csv_path, index=False)
        written.append(csv_path)
        if "json" in self.formats:
            json_path = base.with_suffix(".json")
            frame.to_json(json_path, orient="records", indent=2)
            written.append(json_path)

        logger.debug("table_saved", name=name, rows=len(frame), paths=[str(p) for p in written])
        return written

    def load(self, name: str) -> pd.DataFrame:
        return pd.read_csv((self.directory / name).with_suffix(".csv"))
