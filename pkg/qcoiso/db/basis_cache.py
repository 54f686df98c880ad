import hashlib
import json
import sqlite3
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict

import structlog

from qcoiso.core.config import settings
from qcoiso.services.rootsys import CartanType

logger = structlog.get_logger(__name__)


def hash_params(params: Dict[str, Any]) -> str:
    # Sorted keys give the same hash for the same parameters in any order
    sorted_params_json = json.dumps(params, sort_keys=True)
    return hashlib.sha256(sorted_params_json.encode('utf-8')).hexdigest()


class BasisCache:
    """On-disk store of quotient bases, one row per (type, weight, word order)."""

    def __init__(self, db_file: Path):
        self.db_file = Path(db_file)
        self.initialize()

    def _connect(self) -> sqlite3.Connection:
        self.db_file.parent.mkdir(parents=True, exist_ok=True)
        conn = sqlite3.connect(self.db_file)
        conn.row_factory = sqlite3.Row
        return conn

    def initialize(self) -> None:
        conn = None
        try:
            conn = self._connect()
            conn.execute('''
                CREATE TABLE IF NOT EXISTS quotient_basis (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    cartan_type TEXT NOT NULL,
                    params_hash TEXT NOT NULL, -- SHA256 of the sorted weight/order JSON
                    words TEXT NOT NULL,       -- JSON list of words
                    created_at DATETIME NOT NULL,
                    UNIQUE(cartan_type, params_hash)
                )
            ''')
            conn.commit()
            logger.debug('Basis cache ready', db_file=str(self.db_file))
        except sqlite3.Error as e:
            logger.error('Failed to initialize basis cache', db_file=str(self.db_file), error=str(e), exc_info=True)
            raise
        finally:
            if conn:
                conn.close()

    @staticmethod
    def _key(weight, order: str) -> str:
        return hash_params({'weight': list(weight), 'order': order})

    def load(self, ctype: CartanType, weight, order: str) -> list[tuple[int, ...]] | None:
        conn = None
        try:
            conn = self._connect()
            row = conn.execute(
                'SELECT words FROM quotient_basis WHERE cartan_type = ? AND params_hash = ?',
                (str(ctype), self._key(weight, order)),
            ).fetchone()
        except sqlite3.Error as e:
            logger.warning('Basis cache read failed', error=str(e), cartan_type=str(ctype))
            return None
        finally:
            if conn:
                conn.close()
        if row is None:
            return None
        logger.debug('Basis cache hit', cartan_type=str(ctype), weight=list(weight), order=order)
        return [tuple(w) for w in json.loads(row['words'])]

    def save(self, ctype: CartanType, weight, order: str, words: list[tuple[int, ...]]) -> None:
        conn = None
        try:
            conn = self._connect()
            conn.execute(
                'INSERT OR REPLACE INTO quotient_basis (cartan_type, params_hash, words, created_at) VALUES (?, ?, ?, ?)',
                (str(ctype), self._key(weight, order), json.dumps([list(w) for w in words]),
                 datetime.now(timezone.utc).isoformat()),
            )
            conn.commit()
        except sqlite3.Error as e:
            logger.warning('Basis cache write failed', error=str(e), cartan_type=str(ctype))
        finally:
            if conn:
                conn.close()


def default_basis_cache() -> BasisCache | None:
    if not settings.BASIS_CACHE_PATH:
        return None
    return BasisCache(settings.BASIS_CACHE_PATH)
