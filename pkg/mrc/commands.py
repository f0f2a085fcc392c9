"""
命令行子命令。
每个命令只做参数解析、调用 mrc / storage 的函数、打印结果；异常统一映射为退出码：
    0 成功 / 验证通过    1 验证失败或运行时错误    2 参数错误    3 文件读写错误
"""
from __future__ import annotations

import functools
import logging
import os
import sys
from typing import List, Optional

import click
import numpy as np

from storage import database
from storage.bundle import bundle_digest, load_instance, save_instance
from tower.galois import format_value, parse_element
from tower.matrix import format_matrix
from tower.models import Level

from .config import load_presets, resolve_params
from .construct import build_instance, format_trace, reduction_trace
from .derive import derivation_log, hdl_from_hl
from .layout import all_distance_formulas, parse_pattern
from .models import Certificate, CodeInstance, Construction, Family
from .verify import (
    LOCALITY_LEVELS,
    bound_sweep,
    check_locality,
    encode,
    generator_matrix,
    is_mr,
    min_distance,
    recover,
)

logger = logging.getLogger(__name__)

EXIT_FAIL, EXIT_USAGE, EXIT_IO = 1, 2, 3


def _fail(exc: BaseException, code: int) -> None:
    logger.debug("command failed", exc_info=exc)
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def guarded(fn):
    """把 ValueError / OSError / RuntimeError 映射成退出码。"""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (click.exceptions.Exit, click.Abort):
            raise
        except OSError as exc:
            _fail(exc, EXIT_IO)
        except ValueError as exc:
            _fail(exc, EXIT_USAGE)
        except RuntimeError as exc:
            _fail(exc, EXIT_FAIL)
    return wrapper


def _summary(instance: CodeInstance) -> str:
    tower = instance.tower
    return (
        f"{instance.params.label()} n={instance.n} q={tower.q} m1={tower.m1} m={tower.m} "
        f"construction={instance.construction.value}"
    )


def _format_word(instance: CodeInstance, word: List[int]) -> str:
    top = instance.tower.top
    return "".join(f"t:{format_value(top, x)}\n" for x in word)


def _read_symbols(instance: CodeInstance, path: str, allow_erasures: bool) -> List[Optional[int]]:
    symbols: List[Optional[int]] = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line == "?":
                if not allow_erasures:
                    raise ValueError("erasure marks are only allowed in received words")
                symbols.append(None)
            else:
                symbols.append(parse_element(instance.tower, line).value)
    return symbols


@click.command("construct")
@click.argument("source")
@click.option("--family", type=click.Choice([f.value for f in Family]), help="覆盖参数文件里的码族")
@click.option("--h1-one", is_flag=True, help="使用 h1 = 1 的构造")
@click.option("--strict-q", is_flag=True, help="要求 q ≥ n")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False), help="实例目录")
@guarded
def construct_cmd(source: str, family: Optional[str], h1_one: bool, strict_q: bool, out_dir: str) -> None:
    """按参数文件或预设名构造码并写出实例目录。"""
    params = resolve_params(source)
    if family:
        params = params.model_copy(update={"family": Family(family)})
    construction = Construction.H1_ONE if h1_one else None
    instance = build_instance(params, construction, strict_q or None)
    save_instance(instance, out_dir)
    click.echo(_summary(instance))
    click.echo(f"bundle={out_dir}")


@click.command("verify")
@click.argument("bundle")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="进程数")
@click.option("--no-timing", is_flag=True, help="证书不带耗时")
@click.option("--record", is_flag=True, help="写入证书台账")
@click.option("--db", "db_path", default=None, help="证书台账路径")
@guarded
def verify_cmd(bundle: str, workers: Optional[int], no_timing: bool, record: bool, db_path: Optional[str]) -> None:
    """穷举验证最大可恢复性。"""
    instance = load_instance(bundle)
    certificate = is_mr(instance, workers=workers, timing=False if no_timing else None)
    click.echo(certificate.format())
    if record:
        database.initialize(db_path)
        row = database.store_certificate(bundle_digest(bundle), instance.params, certificate, db_path)
        logger.info("recorded certificate %d", row)
    sys.exit(0 if certificate.passed else EXIT_FAIL)


@click.command("distance")
@click.argument("bundle")
@click.option("--cap", type=click.IntRange(min=1), default=None, help="最多检查到的列数")
@guarded
def distance_cmd(bundle: str, cap: Optional[int]) -> None:
    """暴力求最小距离，并列出各距离公式。"""
    instance = load_instance(bundle)
    d = min_distance(instance, cap)
    click.echo(f"distance={d}" if d is not None else f"distance>{cap}")
    for kind, value in all_distance_formulas(instance.params).items():
        click.echo(f"{kind}={value}")


@click.command("recover")
@click.argument("bundle")
@click.argument("received", type=click.Path(dir_okay=False))
@guarded
def recover_cmd(bundle: str, received: str) -> None:
    """补全接收字中的擦除（每行一个符号，? 表示擦除）。"""
    instance = load_instance(bundle)
    word = recover(instance, _read_symbols(instance, received, allow_erasures=True))
    click.echo(_format_word(instance, word), nl=False)


@click.command("encode")
@click.argument("bundle")
@click.option("--message", type=click.Path(dir_okay=False), default=None, help="k 行消息符号")
@click.option("--seed", type=int, default=None, help="随机消息的种子")
@guarded
def encode_cmd(bundle: str, message: Optional[str], seed: Optional[int]) -> None:
    """编码一条消息；不给消息时用随机消息。"""
    instance = load_instance(bundle)
    G, systematic = generator_matrix(instance)
    if message:
        symbols = _read_symbols(instance, message, allow_erasures=False)
    else:
        top = instance.tower.top
        rng = np.random.default_rng(seed)
        digits = rng.integers(0, top.p, size=(G.nrows, top.flat_degree))
        symbols = [sum(int(d) * top.p ** j for j, d in enumerate(row)) for row in digits]
    click.echo(_format_word(instance, encode(instance, symbols, G)), nl=False)
    logger.info("systematic positions %s", systematic)


@click.command("derive-hdl")
@click.argument("bundle")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False), help="HDL 实例目录")
@click.option("--certificate", "certificate_file", type=click.Path(dir_okay=False), default=None, help="源实例 verify 输出的证书行")
@guarded
def derive_cmd(bundle: str, out_dir: str, certificate_file: Optional[str]) -> None:
    """把 HL 实例删成 HDL 实例。给出通过的证书时不再验证源实例。"""
    instance = load_instance(bundle)
    certificate = None
    if certificate_file:
        with open(certificate_file, "r", encoding="utf-8") as f:
            certificate = Certificate.parse(f.readline())
    derived = hdl_from_hl(instance, certificate)
    save_instance(derived, out_dir)
    click.echo(derivation_log(derived), nl=False)
    click.echo(_summary(derived))
    click.echo(f"bundle={out_dir}")


@click.command("trace")
@click.argument("bundle")
@click.argument("pattern")
@guarded
def trace_cmd(bundle: str, pattern: str) -> None:
    """打印擦除模式下的约化中间量。PATTERN 是文件或 D[i][s]=..;G[i]=.. 文本。"""
    instance = load_instance(bundle)
    text = pattern
    if os.path.isfile(pattern):
        with open(pattern, "r", encoding="utf-8") as f:
            text = f.read()
    trace = reduction_trace(instance, parse_pattern(instance.params, text))
    click.echo(format_trace(trace, instance.tower), nl=False)
    sys.exit(0 if trace.verdict else EXIT_FAIL)


@click.command("locality")
@click.argument("bundle")
@click.option("--level", type=click.Choice(LOCALITY_LEVELS), required=True)
@guarded
def locality_cmd(bundle: str, level: str) -> None:
    """检查中层码或层次局部性。"""
    report = check_locality(load_instance(bundle), level)
    click.echo(report.format(), nl=False)
    sys.exit(0 if report.ok else EXIT_FAIL)


@click.command("export")
@click.argument("bundle")
@click.option("--what", type=click.Choice(["H", "G"]), default="H", help="校验矩阵或生成矩阵")
@click.option("--out", "out_file", type=click.Path(dir_okay=False), default=None)
@guarded
def export_cmd(bundle: str, what: str, out_file: Optional[str]) -> None:
    """导出矩阵文本。"""
    instance = load_instance(bundle)
    M = instance.H if what == "H" else generator_matrix(instance)[0]
    text = format_matrix(M)
    if out_file:
        with open(out_file, "w", encoding="utf-8") as f:
            f.write(text)
        click.echo(f"wrote {out_file}")
    else:
        click.echo(text, nl=False)


@click.command("sweep")
@click.option("--max-n", type=click.IntRange(min=1), required=True)
@click.option("--family", type=click.Choice([f.value for f in Family]), default=None)
@click.option("--max-h1", type=click.IntRange(min=0), default=None)
@guarded
def sweep_cmd(max_n: int, family: Optional[str], max_h1: Optional[int]) -> None:
    """小参数扫描：构造、暴力距离、与界比较。"""
    rows = bound_sweep(max_n, Family(family) if family else None, max_h1)
    for row in rows:
        click.echo(row.format())
    violations = sum(1 for row in rows if row.status == "violation")
    click.echo(f"total={len(rows)} violations={violations}")
    sys.exit(EXIT_FAIL if violations else 0)


@click.command("history")
@click.option("--digest", default=None, help="只看这个矩阵摘要")
@click.option("--db", "db_path", default=None, help="证书台账路径")
@guarded
def history_cmd(digest: Optional[str], db_path: Optional[str]) -> None:
    """列出证书台账。"""
    for record in database.query_certificates(digest, db_path):
        params = record["params"]
        label = ",".join(str(params[key]) for key in ("k", "r1", "r2", "h1", "h2", "delta"))
        click.echo(
            f"{record['id']} {record['digest'][:12]} {record['family']}({label}) "
            f"verdict={record['verdict']} checks={record['checks']} millis={record['millis']}"
        )


@click.command("presets")
@guarded
def presets_cmd() -> None:
    """列出参数预设。"""
    for name, params in sorted(load_presets().items()):
        click.echo(f"{name}: {params.label()} construction={(params.construction or Construction.GENERAL).value}")


COMMANDS = [
    construct_cmd,
    verify_cmd,
    distance_cmd,
    recover_cmd,
    encode_cmd,
    derive_cmd,
    trace_cmd,
    locality_cmd,
    export_cmd,
    sweep_cmd,
    history_cmd,
    presets_cmd,
]
