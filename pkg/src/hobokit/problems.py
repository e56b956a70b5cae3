"""The three built-in demonstration problems.

Each problem is available two ways: built directly with the expression API
(``build``) and as fully unrolled ``.hobo`` source text (``source``).  The
two must describe the same Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .expr import Polynomial, Registry


@dataclass
class BuiltProblem:
    registry: Registry
    hamiltonian: Polynomial
    values: dict[str, Polynomial] = field(default_factory=dict)  # named integer read-outs
    grids: list[str] = field(default_factory=list)                # patterns to print as grids


@dataclass(frozen=True)
class Example:
    name: str
    description: str
    build: Callable[[], BuiltProblem]
    source: Callable[[], str]


def _fmt(c: float) -> str:
    return str(int(c)) if float(c).is_integer() else repr(float(c))


# -- seating --------------------------------------------------------------

def _windows(size: int, run: int):
    for i in range(size):
        for j in range(size - run + 1):
            yield [(i, j + k) for k in range(run)]
    for j in range(size):
        for i in range(size - run + 1):
            yield [(i + k, j) for k in range(run)]


def build_seating(size: int = 5, weight: float = 10, run: int = 3) -> BuiltProblem:
    """Fill a ``size`` x ``size`` grid without ``run`` occupied seats in a line."""
    reg = Registry()
    q = reg.var_array([size, size], "q{}_{}")
    occupy = sum((-q[i, j] for i in range(size) for j in range(size)), Polynomial())
    crowd = Polynomial()
    for cells in _windows(size, run):
        crowd = crowd + np.prod([q[c] for c in cells])
    return BuiltProblem(reg, occupy + weight * crowd, grids=["q{}_{}"])


def seating_source(size: int = 5, weight: float = 10, run: int = 3) -> str:
    lines = [f"# {size}x{size} seating: fill seats, never {run} in a row or column",
             f'var q[{size},{size}] as "q{{}}_{{}}"']
    lines += [f"H += -q[{i},{j}]" for i in range(size) for j in range(size)]
    for cells in _windows(size, run):
        prod = "*".join(f"q[{i},{j}]" for i, j in cells)
        lines.append(f"H += {_fmt(weight)}*({prod})")
    return "\n".join(lines) + "\n"


# -- pythagorean triples --------------------------------------------------

def build_pythagoras(bits: int = 4, weight: float = 10) -> BuiltProblem:
    reg = Registry()
    q = reg.var_array([3, bits], "q{}_{}")
    x, y, z = (sum((2 ** i * q[r, i] for i in range(bits)), Polynomial()) for r in range(3))
    cost = (x ** 2 + y ** 2 - z ** 2) ** 2
    nonzero = Polynomial()
    for r in range(3):
        nonzero = nonzero + np.prod([1 - q[r, i] for i in range(bits)])
    return BuiltProblem(reg, cost + weight * nonzero, values={"x": x, "y": y, "z": z})


def pythagoras_source(bits: int = 4, weight: float = 10) -> str:
    def integer(r):
        return "(" + " + ".join(f"{2 ** i}*q[{r},{i}]" for i in range(bits)) + ")"

    x, y, z = (integer(r) for r in range(3))
    lines = [f"# Pythagorean triples a^2 + b^2 = c^2 with {bits}-bit integers",
             f'var q[3,{bits}] as "q{{}}_{{}}"',
             f"H += ({x}**2 + {y}**2 - {z}**2)**2"]
    for r in range(3):
        prod = "*".join(f"(1 - q[{r},{i}])" for i in range(bits))
        lines.append(f"H += {_fmt(weight)}*{prod}")
    return "\n".join(lines) + "\n"


# -- TSP visiting order with integer encoding ------------------------------

def build_tsp(weight: float = 10) -> BuiltProblem:
    reg = Registry()
    q = reg.var_array([4, 2], "q{}_{}")
    xb, xc, xd = (2 * q[r, 0] + q[r, 1] for r in range(3))
    h = weight * (xb * xc * xd - 6) ** 2
    return BuiltProblem(reg, h, values={"xB": xb, "xC": xc, "xD": xd})


def tsp_source(weight: float = 10) -> str:
    xs = "*".join(f"(2*q[{r},0]+q[{r},1])" for r in range(3))
    return ("# TSP visiting order: positions of B, C, D encoded in two bits each\n"
            'var q[4,2] as "q{}_{}"\n'
            f"H += {_fmt(weight)}*({xs} - 6)**2\n")


EXAMPLES: dict[str, Example] = {
    "seating": Example("seating", "5x5 seating, no three adjacent in a line",
                       build_seating, seating_source),
    "pythagoras": Example("pythagoras", "Pythagorean triples with 4-bit integers",
                          build_pythagoras, pythagoras_source),
    "tsp": Example("tsp", "TSP visiting order with integer encoding",
                   build_tsp, tsp_source),
}
