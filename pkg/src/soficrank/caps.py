"""Size caps guarding against runaway constructions.

Every cap can be overridden through an environment variable
``SOFICRANK_<NAME>`` (e.g. ``SOFICRANK_MAX_SET_SIZE=2000000``).
"""
from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Caps:
    max_set_size: int = 10**6
    max_ball: int = 10**6
    max_closure: int = 10**6
    max_terms: int = 200_000
    prime_search: int = 10**7

    @classmethod
    def from_env(cls, environ=None) -> "Caps":
        environ = os.environ if environ is None else environ
        updates = {}
        for f in fields(cls):
            raw = environ.get(f"SOFICRANK_{f.name.upper()}")
            if raw:
                updates[f.name] = int(raw)
        return replace(cls(), **updates)

    def with_overrides(self, **kw) -> "Caps":
        return replace(self, **{k: int(v) for k, v in kw.items() if v is not None})


_overrides: list[dict] = []


def default_caps() -> Caps:
    """Environment caps with any active :func:`override_caps` applied on top."""
    caps = Caps.from_env()
    for o in _overrides:
        caps = caps.with_overrides(**o)
    return caps


@contextmanager
def override_caps(**kw):
    _overrides.append(kw)
    try:
        yield default_caps()
    finally:
        _overrides.pop()
