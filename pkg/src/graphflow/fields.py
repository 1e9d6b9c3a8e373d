"""Finitely supported vertex functions and their weighted norms.

A :class:`Field` is a sparse map ``vertex -> value``; reads off the support
return 0.  Norms use the weighted counting measure: ``||f||_q^q =
sum |f(x)|^q d_w(x)`` and ``||f||_inf = sup |f|``.  Serialization is
text-based ("vertex_id,value" CSV and a JSON variant) with 17 significant
digits, which round-trips float64 bit-exactly.
"""

from __future__ import annotations

import json
import math


def vertex_to_str(v):
    """Canonical textual form of a vertex id (tuples join with ':')."""
    if isinstance(v, tuple):
        return ":".join(str(c) for c in v)
    return str(v)


def vertex_from_str(s):
    """Inverse of :func:`vertex_to_str`; integer tuples are recognized."""
    parts = s.split(":")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        if len(parts) == 1:
            return s
        raise ValueError(f"malformed vertex id {s!r}") from None


class Field:
    """Finitely supported real function on the vertices of a generator."""

    def __init__(self, generator, values):
        self.generator = generator
        vals = {}
        for v, x in values.items():
            x = float(x)
            if not math.isfinite(x):
                raise ValueError(f"non-finite value {x} at vertex {v!r}")
            if x != 0.0:
                vals[v] = x
        self.values = vals

    def __getitem__(self, v):
        return self.values.get(v, 0.0)

    def __len__(self):
        return len(self.values)

    def support(self):
        """Support vertices in canonical order."""
        return sorted(self.values, key=self.generator.sort_key)

    def is_nonnegative(self):
        return all(x >= 0.0 for x in self.values.values())

    def dominates(self, other):
        """True if ``self >= other`` pointwise."""
        keys = set(self.values) | set(other.values)
        return all(self[v] >= other[v] for v in keys)

    def scaled(self, c):
        return Field(self.generator, {v: c * x for v, x in self.values.items()})

    def support_radius(self, x0, r_cap=None):
        """Largest graph distance from ``x0`` to a support vertex."""
        from .graphs import distance
        cap = r_cap if r_cap is not None else 10 ** 6
        r = 0
        for v in self.support():
            d = distance(self.generator, x0, v, cap)
            if d is None:
                raise ValueError(f"support vertex {v!r} unreachable from {x0!r}")
            r = max(r, d)
        return r

    # -- weighted norms -------------------------------------------------

    def lq_norm(self, q):
        """Weighted norm ``(sum |f(x)|^q d_w(x))^(1/q)``."""
        if q < 1:
            raise ValueError("q must be >= 1")
        g = self.generator
        s = math.fsum(abs(x) ** q * g.degree(v) for v, x in sorted(
            self.values.items(), key=lambda kv: g.sort_key(kv[0])))
        return s ** (1.0 / q)

    def mass(self):
        """The l1 weighted norm ``sum |f(x)| d_w(x)``."""
        g = self.generator
        return math.fsum(abs(x) * g.degree(v) for v, x in sorted(
            self.values.items(), key=lambda kv: g.sort_key(kv[0])))

    def sup_norm(self):
        if not self.values:
            return 0.0
        return max(abs(x) for x in self.values.values())

    # -- serialization --------------------------------------------------

    def to_csv_text(self):
        lines = ["vertex_id,value"]
        for v in self.support():
            lines.append(f"{vertex_to_str(v)},{self.values[v]:.17g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv_text(cls, generator, text):
        values = {}
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0] != "vertex_id,value":
            raise ValueError("missing 'vertex_id,value' header")
        for ln in lines[1:]:
            key, val = ln.rsplit(",", 1)
            values[vertex_from_str(key)] = float(val)
        return cls(generator, values)

    def to_json_text(self):
        obj = {vertex_to_str(v): self.values[v] for v in self.support()}
        return json.dumps({"field": obj}, indent=None, separators=(",", ":"))

    @classmethod
    def from_json_text(cls, generator, text):
        obj = json.loads(text)
        return cls(generator, {vertex_from_str(k): v for k, v in obj["field"].items()})


def delta_field(generator, x0, amplitude=1.0):
    """Point mass ``amplitude`` at ``x0``."""
    return Field(generator, {x0: amplitude})


def ball_indicator_field(generator, x0, radius, amplitude=1.0):
    """Indicator of the ball ``B_radius(x0)`` scaled by ``amplitude``."""
    from .graphs import ball
    reg = ball(generator, x0, radius)
    return Field(generator, {v: amplitude for v in reg.vertices})
