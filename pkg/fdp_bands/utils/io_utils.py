from datetime import datetime
from io import StringIO
from pathlib import Path
from typing import Dict, Any, Optional, TextIO, Tuple, Union
import json
import os
import sys

import numpy as np
import pandas as pd

from ..core.competition import CompetitionSequence
from ..core.errors import InputFormatError, ParameterError

FLOAT_FORMAT = "%.17g"


class IOUtils:
    """Reading competition files and writing reports"""

    @staticmethod
    def _is_number(text: str) -> bool:
        try:
            float(text)
            return True
        except ValueError:
            return False

    @staticmethod
    def read_frame(path: Union[str, Path]) -> pd.DataFrame:
        """
        Read a tab- or comma-separated file; a non-numeric first line is taken as the header
        :param path: file path, or "-" for standard input
        :return: DataFrame (empty when the input holds no data lines)
        """
        try:
            if str(path) == "-":
                text = sys.stdin.read()
            else:
                with open(path, 'r', encoding='utf-8') as f:
                    text = f.read()
        except OSError as e:
            raise InputFormatError(f"Cannot read {path}: {e}") from e

        lines = [line for line in text.splitlines() if line.strip()]
        if not lines:
            return pd.DataFrame()
        sep = "\t" if "\t" in lines[0] else ","
        first = [field.strip() for field in lines[0].split(sep)]
        has_header = not all(IOUtils._is_number(field) for field in first)
        try:
            frame = pd.read_csv(
                StringIO("\n".join(lines)),
                sep=sep,
                header=0 if has_header else None,
                skipinitialspace=True,
            )
        except (ValueError, pd.errors.ParserError) as e:
            raise InputFormatError(f"{path} could not be parsed: {e}") from e
        if has_header:
            frame.columns = [str(c).strip().lower() for c in frame.columns]
        return frame

    @staticmethod
    def _numeric(frame: pd.DataFrame, path: Union[str, Path]) -> pd.DataFrame:
        converted = frame.apply(pd.to_numeric, errors="coerce")
        bad = converted.isna() & frame.notna()
        if bad.any().any() or frame.isna().any().any():
            row = int(np.flatnonzero((bad | frame.isna()).any(axis=1).to_numpy())[0])
            raise InputFormatError(f"{path}: non-numeric or missing value on data row {row + 1}")
        return converted

    @staticmethod
    def read_competition(
        path: Union[str, Path],
        rng: Union[np.random.Generator, int, None] = None,
    ) -> CompetitionSequence:
        """
        Read a label file: a single label column taken in the given order,
        or score and label columns sorted by nonincreasing score
        """
        frame = IOUtils.read_frame(path)
        if frame.empty:
            return CompetitionSequence.from_labels([])
        if isinstance(frame.columns[0], str):
            if "label" not in frame.columns:
                raise InputFormatError(f"{path}: no 'label' column in header {list(frame.columns)}")
            score_col = "score" if "score" in frame.columns else None
            frame = frame[[c for c in ("score", "label") if c in frame.columns]]
        else:
            if frame.shape[1] not in (1, 2):
                raise InputFormatError(f"{path}: expected 1 (label) or 2 (score, label) columns, got {frame.shape[1]}")
            frame.columns = ["label"] if frame.shape[1] == 1 else ["score", "label"]
            score_col = "score" if frame.shape[1] == 2 else None
        frame = IOUtils._numeric(frame, path)

        labels = frame["label"].to_numpy()
        if not np.all(np.isin(labels, (1, -1, 0))):
            bad = sorted(set(labels[~np.isin(labels, (1, -1, 0))].tolist()))
            raise InputFormatError(f"{path}: labels must be 1, -1 or 0, found {bad}")
        labels = labels.astype(np.int64)
        if score_col is None:
            return CompetitionSequence.from_labels(labels)
        return CompetitionSequence.from_scores(frame[score_col].to_numpy(dtype=float), labels, rng)

    @staticmethod
    def read_multi_decoy(path: Union[str, Path], n_decoys: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        Read target, decoy1..decoyd columns
        :return: (targets of shape (m,), decoys of shape (m, n_decoys))
        """
        if n_decoys < 1:
            raise ParameterError(f"--decoys must be positive, got {n_decoys}")
        frame = IOUtils.read_frame(path)
        if frame.empty:
            return np.zeros(0), np.zeros((0, n_decoys))
        if isinstance(frame.columns[0], str):
            wanted = ["target"] + [f"decoy{j}" for j in range(1, n_decoys + 1)]
            missing = [c for c in wanted if c not in frame.columns]
            if missing:
                raise InputFormatError(f"{path}: missing columns {missing}")
            frame = frame[wanted]
        elif frame.shape[1] != n_decoys + 1:
            raise InputFormatError(f"{path}: expected {n_decoys + 1} columns (target + {n_decoys} decoys), got {frame.shape[1]}")
        values = IOUtils._numeric(frame, path).to_numpy(dtype=float)
        return values[:, 0], values[:, 1:]

    @staticmethod
    def write_competition(seq: CompetitionSequence, path: Union[str, Path]) -> Path:
        """Write score,label columns (labels only when the sequence has no scores)"""
        data = {"label": seq.labels.astype(np.int64)}
        if seq.scores is not None:
            data = {"score": seq.scores, **data}
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(data).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return path

    @staticmethod
    def to_jsonable(value: Any) -> Any:
        """numpy scalars and arrays as plain Python values"""
        if isinstance(value, dict):
            return {str(k): IOUtils.to_jsonable(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [IOUtils.to_jsonable(v) for v in value]
        if isinstance(value, np.ndarray):
            return IOUtils.to_jsonable(value.tolist())
        if isinstance(value, np.generic):
            return value.item()
        return value

    @staticmethod
    def write_json(data: Dict[str, Any], stream: Optional[TextIO] = None) -> None:
        """JSON with shortest round-trip float repr (at most 17 significant digits)"""
        stream = stream or sys.stdout
        json.dump(IOUtils.to_jsonable(data), stream, indent=2, allow_nan=False)
        stream.write("\n")

    @staticmethod
    def write_csv(frame: pd.DataFrame, path: Union[str, Path, None] = None) -> None:
        """CSV to path, or to standard output when path is None"""
        if path is None:
            sys.stdout.write(frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n"))
            return
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

    @staticmethod
    def save_report(name: str, report: Dict[str, Any], output_dir: str = "benchmark_reports") -> str:
        """
        Save a JSON report
        :param name: report name, used in the file name
        :param report: report content
        :param output_dir: output directory
        :return: saved file path
        """
        os.makedirs(output_dir, exist_ok=True)
        record = {"name": name, "timestamp": datetime.now().isoformat(), **report}
        filepath = os.path.join(output_dir, f"{name}.json")
        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(IOUtils.to_jsonable(record), f, ensure_ascii=False, indent=2)
        return filepath
