"""
验证证书的 SQLite 台账。
每次 verify --record 写一条：H.txt 的摘要、参数、结论、检查数、耗时和反例。
"""
from __future__ import annotations  # 兼容未来类型注解语法

import json
import sqlite3  # 标准库SQLite操作
from pathlib import Path  # 路径处理
from typing import List, Optional  # 类型注解

from mrc.models import Certificate, CodeParams
from storage.config import DATABASE_PATH  # 数据库文件路径配置

# 证书表结构
SCHEMA = """
CREATE TABLE IF NOT EXISTS certificates (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    digest TEXT NOT NULL,             -- H.txt 的 sha256
    family TEXT NOT NULL,             -- hl / hdl
    params TEXT NOT NULL,             -- 六个参数的 JSON
    verdict TEXT NOT NULL,            -- pass / fail
    checks INTEGER,                   -- 检查数
    millis INTEGER,                   -- 耗时（毫秒），可为空
    witness_E TEXT,                   -- 失败时的 E
    witness_T TEXT,                   -- 失败时的 T
    created_at TEXT DEFAULT CURRENT_TIMESTAMP -- 创建时间
);
CREATE INDEX IF NOT EXISTS idx_certificates_digest ON certificates(digest); -- 按矩阵查询
"""


def _path(db_path: Optional[str]) -> Path:
    return Path(db_path or DATABASE_PATH)


def initialize(db_path: Optional[str] = None) -> None:
    """
    初始化数据库文件和表结构。
    若目录不存在则自动创建。
    """
    path = _path(db_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with sqlite3.connect(path) as conn:
        conn.executescript(SCHEMA)


def _join(values) -> Optional[str]:
    return ",".join(str(v) for v in values) if values is not None else None


def store_certificate(digest: str, params: CodeParams, certificate: Certificate, db_path: Optional[str] = None) -> int:
    """写入一条证书，返回行号。"""
    with sqlite3.connect(_path(db_path)) as conn:
        cursor = conn.execute(
            """
            INSERT INTO certificates
            (digest, family, params, verdict, checks, millis, witness_E, witness_T)
            VALUES (?, ?, ?, ?, ?, ?, ?, ?)
            """,
            (
                digest,
                params.family.value,
                json.dumps(params.core(), sort_keys=True),
                certificate.verdict,
                certificate.checks,
                certificate.millis,
                _join(certificate.witness_E),
                _join(certificate.witness_T),
            ),
        )
        conn.commit()
        return cursor.lastrowid


def query_certificates(digest: Optional[str] = None, db_path: Optional[str] = None) -> List[dict]:
    """按写入顺序列出证书；给出 digest 时只看这一个矩阵。"""
    path = _path(db_path)
    if not path.exists():
        return []
    sql = "SELECT id, digest, family, params, verdict, checks, millis, witness_E, witness_T, created_at FROM certificates"
    args: tuple = ()
    if digest:
        sql += " WHERE digest = ?"
        args = (digest,)
    sql += " ORDER BY id"
    with sqlite3.connect(path) as conn:
        cursor = conn.execute(sql, args)
        columns = [desc[0] for desc in cursor.description]
        results = []
        for row in cursor.fetchall():
            record = dict(zip(columns, row))
            record["params"] = json.loads(record["params"])
            results.append(record)
    return results
