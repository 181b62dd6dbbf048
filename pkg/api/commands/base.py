"""
Shared plumbing for CLI subcommands
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, TextIO

import pandas as pd

from domain.entities import Scenario
from infrastructure.container import Container
from infrastructure.repositories.table_repository import TableRepository


@dataclass
class CommandContext:
    scenario: Scenario
    container: Container
    stdout: TextIO
    as_json: bool = False
    written: List[Path] = field(default_factory=list)

    @property
    def out_dir(self) -> Path:
        return Path(self.scenario.output.directory)

    def tables(self, subcommand: str) -> TableRepository:
        formats = list(self.scenario.output.formats)
        if self.as_json and "json" not in formats:
            formats.append("json")
        return self.container.get_table_repository(self.out_dir / subcommand, formats)

    def emit(self, repo: TableRepository, name: str, frame: pd.DataFrame, headline: str) -> None:
        """Write one table and print its one-line summary"""
        paths = repo.save(name, frame)
        self.written.extend(paths)
        print(f"{headline} -> {paths[0]}", file=self.stdout)


def tag(value: float) -> str:
    """Filename-safe rendering of a numeric parameter"""
    if math.isinf(value):
        return "inf"
    return f"{value:g}".replace(".", "p").replace("+", "")
