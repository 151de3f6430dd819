"""Fourfold Massey products over Q: symbols, conics and vanishing witnesses."""

import json
from fractions import Fraction

from . import _massey4

__all__ = [
    "JobError",
    "run_job",
    "hilbert_symbol",
    "ramified_places",
    "solve_conic",
    "squarefree_part",
    "witness",
    "verify",
]


class JobError(RuntimeError):
    def __init__(self, exit_code, document):
        super().__init__(document.get("error", {}).get("message", document.get("status")))
        self.exit_code = exit_code
        self.document = document


def _q(x):
    return str(Fraction(x))


def run_job(command, payload=None, config=None):
    """Runs one job and returns (exit_code, document)."""
    job = {"command": command, "payload": payload or {}}
    if config:
        job["config"] = config
    code, text = _massey4.run_job(json.dumps(job))
    return code, json.loads(text)


def hilbert_symbol(a, b, p):
    return _massey4.hilbert_symbol(_q(a), _q(b), int(p))


def ramified_places(a, b):
    return _massey4.ramified_places(_q(a), _q(b))


def solve_conic(a, b):
    sol = _massey4.solve_conic(_q(a), _q(b))
    return None if sol is None else tuple(Fraction(v) for v in sol)


def squarefree_part(q):
    return int(_massey4.squarefree_part(_q(q)))


def witness(a, b, c, d, alpha=None, delta=None, **config):
    payload = {"a": _q(a), "b": _q(b), "c": _q(c), "d": _q(d)}
    if alpha is not None:
        payload["alpha"] = [_q(x) for x in alpha]
        payload["delta"] = [_q(x) for x in delta]
    code, doc = run_job("witness", payload, config)
    if code != 0:
        raise JobError(code, doc)
    return doc["result"]


def verify(result):
    """Re-checks a witness document returned by witness()."""
    keys = ("a", "b", "c", "d", "alpha", "delta", "certificate")
    code, doc = run_job("verify", {k: result[k] for k in keys})
    return code == 0 and doc["result"]["ok"]
