"""Experiment pipeline: configuration, commands and benchmark."""

from .benchmark import BenchResult, cmd_bench, print_bench_result
from .commands import cmd_eval, cmd_gen, cmd_gen_test, cmd_train, cmd_transform
from .pipeline_config import (
    PipelineConfig,
    load_pipeline_config,
    pipeline_config_from_dict,
    save_pipeline_config,
)

__all__ = [
    'BenchResult',
    'PipelineConfig',
    'cmd_bench',
    'cmd_eval',
    'cmd_gen',
    'cmd_gen_test',
    'cmd_train',
    'cmd_transform',
    'load_pipeline_config',
    'pipeline_config_from_dict',
    'print_bench_result',
    'save_pipeline_config',
]
