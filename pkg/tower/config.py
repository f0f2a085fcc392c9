"""
有限域塔运算层的统一配置。
所有配置项均可通过环境变量覆盖，方便在小机器和大机器之间切换。
"""
from __future__ import annotations

import os


def _get_bool_env(name: str, default: bool) -> bool:
    """
    读取布尔型环境变量，支持 1/true/yes/on，无则返回默认值。
    """
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "on"}


TABLE_LIMIT = int(os.getenv("MRC_TABLE_LIMIT", str(1 << 21)))  # 阶不超过该值的域建 exp/log 表
SUBSET_BUDGET = int(os.getenv("MRC_SUBSET_BUDGET", "1000000"))  # k-wise 独立性检查的子集数上限
DEGREE_CAP = int(os.getenv("MRC_DEGREE_CAP", "64"))  # 贪心搜索的扩张次数上限
BUILD_TABLES = _get_bool_env("MRC_BUILD_TABLES", True)  # 关闭后全部走多项式运算（调试用）
