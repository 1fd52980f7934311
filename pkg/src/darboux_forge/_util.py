"""Small shared helpers: worker counts, deterministic JSON."""
import json
import math
import os


def worker_count() -> int:
    """Worker cap from DARBOUX_FORGE_THREADS (0 or unset = auto)."""
    raw = os.environ.get("DARBOUX_FORGE_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        return os.cpu_count() or 1
    return n


def _round_floats(obj, sig: int):
    if isinstance(obj, float):
        if obj == 0.0 or not math.isfinite(obj):
            return obj
        return float(f"{obj:.{sig}g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v, sig) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, sig) for v in obj]
    return obj


def stable_json(obj, sig: int = 12) -> str:
    """Deterministic JSON: floats rounded to `sig` significant digits, keys sorted.

    Reruns with identical inputs produce byte-identical files.
    """
    return json.dumps(_round_floats(obj, sig), sort_keys=True, indent=1)
