"""Budgets and seeded randomness.

Every budget can be overridden through an environment variable so that a
run can be widened without code changes; the values in effect are echoed
into reports.
"""

import contextlib
import hashlib
import os
import random

DEFAULTS = {
    "kappa_bits": 64,       # max bits of q^kappa for the torsion field
    "max_ell": 13,          # largest ell for exhaustive span searches
    "sample_budget": 96,    # random draws while building an l-torsion basis
    "retry_budget": 32,     # re-randomizations per pairing evaluation
}

ENV_NAMES = {
    "kappa_bits": "G2LAB_KAPPA_BITS",
    "max_ell": "G2LAB_MAX_ELL",
    "sample_budget": "G2LAB_SAMPLE_BUDGET",
    "retry_budget": "G2LAB_RETRY_BUDGET",
}


_overrides = {}


def budget(name):
    if name in _overrides:
        return _overrides[name]
    env = os.environ.get(ENV_NAMES[name])
    if env is not None:
        return int(env)
    return DEFAULTS[name]


@contextlib.contextmanager
def overrides(values):
    """Temporarily replace budgets, e.g. from a scan manifest."""
    unknown = set(values) - set(DEFAULTS)
    if unknown:
        raise KeyError("unknown budget(s): %s" % ", ".join(sorted(unknown)))
    saved = dict(_overrides)
    _overrides.update({k: int(v) for k, v in values.items()})
    try:
        yield
    finally:
        _overrides.clear()
        _overrides.update(saved)


def budgets():
    return {name: budget(name) for name in DEFAULTS}


def derive_rng(seed, *labels):
    """An independent random.Random keyed by a seed and a label path."""
    key = repr((int(seed),) + tuple(str(x) for x in labels)).encode()
    digest = hashlib.sha256(key).digest()
    return random.Random(int.from_bytes(digest[:16], "big"))
