"""
编码构造与验证的统一配置。
环境变量可覆盖默认值；参数预设从 config/params/ 目录加载（JSON 或 YAML）。
"""
from __future__ import annotations

import glob
import json
import logging
import os
from typing import Dict, Union

import yaml

from .models import CodeParams

logger = logging.getLogger(__name__)


def _get_bool_env(name: str, default: bool) -> bool:
    """
    读取布尔型环境变量，支持 1/true/yes/on，无则返回默认值。
    """
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "on"}


WORKERS = int(os.getenv("MRC_WORKERS", "1"))  # verify 默认进程数
STRICT_Q = _get_bool_env("MRC_STRICT_Q", False)  # 是否默认要求 q ≥ n
TIMING = _get_bool_env("MRC_TIMING", True)  # 证书是否带 millis=
CHUNK_SIZE = int(os.getenv("MRC_CHUNK_SIZE", "64"))  # 并行验证时每块的 E 个数
IN_FLIGHT = int(os.getenv("MRC_IN_FLIGHT", "4"))  # 并行验证时每个进程最多排队的块数

_BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
PARAMS_DIR = os.getenv("MRC_PARAMS_DIR", os.path.join(_BASE_DIR, "config", "params"))  # 参数预设目录


def read_params_file(path: str) -> CodeParams:
    """读取单个参数文件，按扩展名选择 JSON 或 YAML。"""
    with open(path, "r", encoding="utf-8") as f:
        if path.endswith((".yaml", ".yml")):
            data = yaml.safe_load(f)
        else:
            data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError(f"parameter file {path} must hold a mapping")
    return CodeParams.model_validate(data)


def load_presets(params_dir: str = PARAMS_DIR) -> Dict[str, CodeParams]:
    """
    从预设目录加载所有参数文件，文件名（不含扩展名）即预设名。
    单个文件出错只记录，不影响其他预设。
    """
    presets: Dict[str, CodeParams] = {}
    if not os.path.isdir(params_dir):
        logger.warning("parameter directory not found: %s", params_dir)
        return presets
    patterns = ("*.json", "*.yaml", "*.yml")
    for pattern in patterns:
        for path in sorted(glob.glob(os.path.join(params_dir, pattern))):
            name = os.path.splitext(os.path.basename(path))[0]
            try:
                presets[name] = read_params_file(path)
            except (OSError, ValueError) as exc:
                logger.error("failed to load parameter file %s: %s", path, exc)
    return presets


def resolve_params(source: Union[str, os.PathLike]) -> CodeParams:
    """参数来源可以是文件路径，也可以是预设名。"""
    source = os.fspath(source)
    if os.path.exists(source):
        return read_params_file(source)
    presets = load_presets()
    if source in presets:
        return presets[source]
    raise FileNotFoundError(f"no parameter file or preset named {source!r}")
