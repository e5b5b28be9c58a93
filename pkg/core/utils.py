import hashlib
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from django.conf import settings


def worker_count():
    configured = getattr(settings, "SGGEC_THREADS", None)
    return max(1, int(configured or os.cpu_count() or 1))


def parallel_map(func, items):
    """Order-preserving map over a thread pool capped by SGGEC_THREADS."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def make_rng(*seed_parts):
    """A PCG64 generator derived from an explicit seed sequence."""
    return np.random.default_rng([int(part) for part in seed_parts])


def sha256_text(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
