import os
DATABASE_PATH = os.getenv("MRC_DB_PATH", "./data/certificates.db")
