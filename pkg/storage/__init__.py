"""实例目录的读写与验证证书的 SQLite 台账。"""
