"""libotda.cli: command line interface and file formats"""
from ._artifact import RankingArtifact
from ._commands import build_parser, cmd_adapt, cmd_pipeline, cmd_rank, main
from ._io import (
    atomic_write_text,
    load_csv,
    write_data_csv,
    write_frame_csv,
    write_json,
)
