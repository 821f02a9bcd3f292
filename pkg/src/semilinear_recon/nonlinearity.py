"""Scalar nonlinearities ``s -> F(s)`` and the named registry used in experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Nonlinearity:
    """A vectorised scalar map with a name and a bound on ``|F'|`` over ``[0, 1]``.

    ``slope_bound`` is ``None`` when no analytic bound is known.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(compare=False, repr=False)
    slope_bound: float | None = None

    def __call__(self, s):
        return self.func(np.asarray(s, dtype=float))


def piecewise_linear(knots, name: str | None = None) -> Nonlinearity:
    """Linear interpolant through ``(s, F)`` knots, held constant outside them."""
    pts = sorted((float(a), float(b)) for a, b in knots)
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if np.any(np.diff(xs) <= 0):
        raise ValueError("knot abscissae must be distinct")
    slopes = np.abs(np.diff(ys) / np.diff(xs)) if len(xs) > 1 else np.zeros(1)
    if name is None:
        name = "pwl:" + ";".join(f"{a!r},{b!r}" for a, b in pts)
    return Nonlinearity(name, lambda s: np.interp(s, xs, ys), float(slopes.max()))


_REGISTRY: dict[str, Nonlinearity] = {}


def _register(name, func, bound):
    _REGISTRY[name] = Nonlinearity(name, func, bound)


_register("zero", lambda s: np.zeros_like(s), 0.0)
_register("neg_u", lambda s: -s, 1.0)
_register("neg_u2", lambda s: -(s**2), 2.0)
_register("neg_u3", lambda s: -(s**3), 3.0)
_register("neg_log1p", lambda s: -np.log1p(s), 1.0)
_register("exp_half", lambda s: (1.0 - np.exp(s)) / 2.0, math.e / 2.0)
_register("neg_sin", lambda s: -np.sin(s), 1.0)
_register("cos_pi", lambda s: (np.cos(np.pi * s) - 1.0) / 2.5, math.pi / 2.5)

# notation used in tables and plots
LABELS = {
    "zero": "0",
    "neg_u": "-u",
    "neg_u2": "-u^2",
    "neg_u3": "-u^3",
    "neg_log1p": "-ln(1+u)",
    "exp_half": "(1-e^u)/2",
    "neg_sin": "-sin(u)",
    "cos_pi": "(cos(pi u)-1)/2.5",
}


def registry_names() -> list[str]:
    return list(_REGISTRY)


def get(name: str) -> Nonlinearity:
    """Look up a registry entry, or parse ``pwl:s0,F0;s1,F1;...``."""
    if name in _REGISTRY:
        return _REGISTRY[name]
    if name.startswith("pwl:"):
        try:
            knots = [tuple(map(float, p.split(","))) for p in name[4:].split(";") if p]
        except ValueError as exc:
            raise KeyError(f"malformed piecewise-linear spec {name!r}") from exc
        if not knots or any(len(k) != 2 for k in knots):
            raise KeyError(f"malformed piecewise-linear spec {name!r}")
        return piecewise_linear(knots, name)
    raise KeyError(f"unknown nonlinearity {name!r}; known: {', '.join(_REGISTRY)}")
