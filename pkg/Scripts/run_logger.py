# run_logger.py
# Append-only JSONL run log: each record carries a SHA3-512 digest and the digest of the
# record before it, so edits and deletions are both detectable.

import hashlib
import json
import time
from pathlib import Path
from typing import List, Optional

LOG_FILE = Path("loopk_log.jsonl")
GENESIS = "0"


def sha3_hash(data: str) -> str:
    return hashlib.sha3_512(data.encode()).hexdigest()


def _last_digest(path: Path) -> str:
    if not path.exists():
        return GENESIS
    last = None
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                last = line
    if last is None:
        return GENESIS
    return json.loads(last)["sha3"]


def _digest(data: str, prev: str) -> str:
    return sha3_hash(prev + data)


# Appends one event and returns its digest
def log_event(event: dict, log_file: Optional[Path] = None) -> str:
    path = Path(log_file) if log_file is not None else LOG_FILE
    event_data = json.dumps({
        "timestamp": time.time(),
        "event": event,
    }, sort_keys=True)
    prev = _last_digest(path)
    entry = {
        "data": event_data,
        "prev": prev,
        "sha3": _digest(event_data, prev),
    }
    with open(path, "a", encoding="utf-8") as f:
        f.write(json.dumps(entry) + "\n")
    return entry["sha3"]


# 1-based line numbers whose digest or back-link does not check out
def verify_log(log_file: Optional[Path] = None) -> List[int]:
    path = Path(log_file) if log_file is not None else LOG_FILE
    bad = []
    prev = GENESIS
    with open(path, "r", encoding="utf-8") as f:
        for idx, line in enumerate(f, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj.get("prev") != prev or _digest(obj["data"], obj["prev"]) != obj["sha3"]:
                bad.append(idx)
            prev = obj["sha3"]
    return bad


def read_events(log_file: Optional[Path] = None) -> List[dict]:
    path = Path(log_file) if log_file is not None else LOG_FILE
    with open(path, "r", encoding="utf-8") as f:
        return [json.loads(json.loads(line)["data"])["event"] for line in f if line.strip()]
