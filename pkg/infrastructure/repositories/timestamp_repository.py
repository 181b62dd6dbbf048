"""
Timestamp Repository: binary dump of simulated detector clicks

File layout: three text header lines

    # resolution_s=<float>
    # acquisition_s=<float>
    # records=<int>

followed by `records` packed little-endian records of
(detector: u1, ticks: u8), sorted by detector then ticks.
"""
from __future__ import annotations

from pathlib import Path
from typing import Dict, Union

import numpy as np
import structlog

from domain.entities import TimestampSeries

logger = structlog.get_logger(__name__)

DETECTOR_CODES = {"A1": 0, "A2": 1, "B1": 2, "B2": 3}
RECORD_DTYPE = np.dtype([("detector", "<u1"), ("ticks", "<u8")])
HEADER_LINES = 3


class TimestampRepository:
    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)

    def save(self, name: str, series: Dict[str, TimestampSeries]) -> Path:
        if not series:
            raise ValueError("No timestamp series to dump")
        resolutions = {s.resolution_s for s in series.values()}
        if len(resolutions) != 1:
            raise ValueError("Series in one dump must share a resolution")
        first = next(iter(series.values()))

        chunks = []
        for label in sorted(series, key=lambda k: DETECTOR_CODES[k]):
            ticks = series[label].ticks
            if ticks.size and ticks.min() < 0:
                raise ValueError(f"Negative ticks in {label} cannot be stored unsigned")
            chunk = np.empty(ticks.shape[0], dtype=RECORD_DTYPE)
            chunk["detector"] = DETECTOR_CODES[label]
            chunk["ticks"] = ticks
            chunks.append(chunk)
        records = np.concatenate(chunks)

        path = (self.directory / name).with_suffix(".bin")
        path.parent.mkdir(parents=True, exist_ok=True)
        header = (
            f"# resolution_s={first.resolution_s!r}\n"
            f"# acquisition_s={first.acquisition_s!r}\n"
            f"# records={records.shape[0]}\n"
        ).encode("ascii")
        with path.open("wb") as fh:
            fh.write(header)
            fh.write(records.tobytes())
        logger.info("timestamps_dumped", path=str(path), records=int(records.shape[0]))
        return path

    @staticmethod
    def load(path: Union[str, Path]) -> Dict[str, TimestampSeries]:
        """Read a dump back; pair ids are not stored and come back empty"""
        data = Path(path).read_bytes()
        meta = {}
        offset = 0
        for _ in range(HEADER_LINES):
            end = data.index(b"\n", offset)
            key, value = data[offset:end].decode("ascii").lstrip("# ").split("=", 1)
            meta[key] = value
            offset = end + 1
        records = np.frombuffer(data, dtype=RECORD_DTYPE, count=int(meta["records"]), offset=offset)

        names = {code: label for label, code in DETECTOR_CODES.items()}
        out: Dict[str, TimestampSeries] = {}
        for code in np.unique(records["detector"]):
            ticks = records["ticks"][records["detector"] == code].astype(np.int64)
            out[names[int(code)]] = TimestampSeries(
                detector=names[int(code)],
                ticks=ticks,
                resolution_s=float(meta["resolution_s"]),
                acquisition_s=float(meta["acquisition_s"]),
            )
        return out
