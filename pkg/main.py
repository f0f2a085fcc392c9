"""
主入口：层次局部可恢复码的构造、验证、派生命令行。

用法示例：
    python main.py construct hl16 --h1-one --out out/ex1
    python main.py verify out/ex1 --workers 4 --record
"""
import logging
import sys
from typing import List, Optional

import click
from dotenv import load_dotenv

# 先加载 .env，各模块的 config 在导入时读取环境变量
load_dotenv()

from mrc.commands import COMMANDS  # noqa: E402

logger = logging.getLogger("mrc.main")

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


@click.group()
@click.option("--log-level", type=click.Choice(LOG_LEVELS, case_sensitive=False), default="WARNING", show_default=True)
def cli(log_level: str) -> None:
    """HL / HDL 最大可恢复码工具。"""
    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


for command in COMMANDS:
    cli.add_command(command)


def run(argv: Optional[List[str]] = None) -> int:
    """执行一次命令行，返回退出码。"""
    try:
        cli.main(args=argv, prog_name="mrc")
    except SystemExit as exc:
        if exc.code is None or isinstance(exc.code, int):
            return exc.code or 0
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(run())
