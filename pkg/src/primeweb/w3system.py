"""Assembly and export of the full three-rotation web system.

The system pins 76 structural primes (three from each of the first 25
rays plus the fourth element of ray 12) onto 76 spline segments with
unknowns {alpha_i, theta_i, beta_i}. Equations: 76 arc hits, 76 angle
hits against fixed ray-angle parameters taken from the approximate web,
75 continuity couplings and the initial condition beta_1 = 0, totalling
228 equations in 228 unknowns. Ray separation yields one inequality per
ray pair: 300 for 25 rays (the stated count 304 is documented as a
discrepancy, not reproduced). Solving is out of scope; the system is
exported as a text model and can be re-parsed losslessly.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .engine import PrimeIndexer
from .spiral import LogSpiral
from .web import DEFAULT_K0, DEFAULT_PHI_DEG, TWO_PI, truncated_rays

STATED_INEQUALITY_COUNT = 304
SEPARATION_EPS = 1e-6


@dataclass
class W3System:
    primes: list[int]
    rays: dict[int, list[int]]
    ray_angles: dict[int, float]
    windings: dict[int, int]
    equations: list[str]
    inequalities: list[str]
    notes: list[str] = field(default_factory=list)

    @property
    def unknown_count(self) -> int:
        return 3 * len(self.primes)

    @property
    def equation_count(self) -> int:
        return len(self.equations)

    @property
    def inequality_count(self) -> int:
        return len(self.inequalities)


def w3_generators() -> list[int]:
    """First 25 ray generators: 1 and the composites up to 36."""
    gens = [1]
    g = 4
    while len(gens) < 25:
        if any(g % d == 0 for d in range(2, int(math.isqrt(g)) + 1)):
            gens.append(g)
        g += 1
    return gens


def assemble_w3_system(
    engine: PrimeIndexer,
    k0: int = DEFAULT_K0,
    phi_deg: float = DEFAULT_PHI_DEG,
) -> W3System:
    gens = w3_generators()
    rays_data, _ = truncated_rays(engine, gens, 4, k0=k0)
    rays = {g: rays_data[g][:3] for g in gens}
    rays[12] = rays_data[12][:4]  # the initial ray carries its 4th element
    primes = sorted(v for vals in rays.values() for v in vals)
    assert len(primes) == 76
    index_of = {p: i + 1 for i, p in enumerate(primes)}
    ray_of = {v: g for g, vals in rays.items() for v in vals}

    # fixed angle parameters from the pure-spiral initial approximation
    base = LogSpiral(math.radians(phi_deg))
    ray_angles = {
        g: base.theta_for_value(float(vals[0])) % TWO_PI for g, vals in rays.items()
    }
    windings = {}
    for p in primes:
        th0 = base.theta_for_value(float(p))
        windings[p] = round((th0 - ray_angles[ray_of[p]]) / TWO_PI)

    equations = []
    for i, p in enumerate(primes, start=1):
        prev_p = primes[i - 2] if i > 1 else 0
        prev_t = f"theta[{i - 1}]" if i > 1 else "0"
        equations.append(
            f"arc_hit[{i}]: sqrt(1 + 1/alpha[{i}]^2) * exp(beta[{i}])"
            f" * (exp(alpha[{i}]*theta[{i}]) - exp(alpha[{i}]*{prev_t}))"
            f" = {p - prev_p};"
        )
    for i, p in enumerate(primes, start=1):
        g = ray_of[p]
        equations.append(
            f"angle_hit[{i}]: theta[{i}] = {ray_angles[g]!r} + 2*pi*{windings[p]};"
        )
    for i in range(2, len(primes) + 1):
        equations.append(
            f"continuity[{i}]: alpha[{i - 1}]*theta[{i - 1}] + beta[{i - 1}]"
            f" = alpha[{i}]*theta[{i - 1}] + beta[{i}];"
        )
    equations.append("initial[1]: beta[1] = 0;")

    inequalities = []
    firsts = {g: index_of[vals[0]] for g, vals in rays.items()}
    for a in range(len(gens)):
        for b in range(a + 1, len(gens)):
            g1, g2 = gens[a], gens[b]
            i1, i2 = firsts[g1], firsts[g2]
            inequalities.append(
                f"separation[{g1},{g2}]:"
                f" angdist(theta[{i1}], theta[{i2}]) >= {SEPARATION_EPS!r};"
            )
    notes = [
        f"inequality count {len(inequalities)} (one per ray pair, 25 rays);"
        f" stated count {STATED_INEQUALITY_COUNT} not reproduced",
    ]
    return W3System(primes, rays, ray_angles, windings, equations, inequalities, notes)


# -- text export and round trip ----------------------------------------------


def export_text(sys3: W3System) -> str:
    n = len(sys3.primes)
    lines = [
        "# three-rotation web system",
        f"param n := {n};",
        "param primes :=",
    ]
    lines += [f"  {i + 1} {p}" for i, p in enumerate(sys3.primes)]
    lines.append(";")
    lines.append("param rays :=")
    for g in sorted(sys3.rays):
        vals = " ".join(str(v) for v in sys3.rays[g])
        lines.append(f"  {g} : {vals}")
    lines.append(";")
    lines.append("param ray_angles :=")
    for g in sorted(sys3.ray_angles):
        lines.append(f"  {g} {sys3.ray_angles[g]!r}")
    lines.append(";")
    lines.append("param windings :=")
    for p in sys3.primes:
        lines.append(f"  {p} {sys3.windings[p]}")
    lines.append(";")
    lines.append(f"var alpha{{1..{n}}} > 0;")
    lines.append(f"var theta{{1..{n}}} > 0;")
    lines.append(f"var beta{{1..{n}}};")
    lines.append("subject to")
    lines += ["  " + e for e in sys3.equations]
    lines.append("inequalities")
    lines += ["  " + q for q in sys3.inequalities]
    lines.append("end;")
    for note in sys3.notes:
        lines.append(f"# note: {note}")
    return "\n".join(lines) + "\n"


def parse_text(text: str) -> W3System:
    """Inverse of export_text; the round trip is exact."""
    def block(name: str) -> list[str]:
        m = re.search(rf"param {name} :=\n(.*?)\n;", text, re.S)
        if not m:
            raise ValueError(f"missing block {name}")
        return [ln.strip() for ln in m.group(1).splitlines() if ln.strip()]

    primes = [int(ln.split()[1]) for ln in block("primes")]
    rays = {}
    for ln in block("rays"):
        head, _, tail = ln.partition(":")
        rays[int(head)] = [int(v) for v in tail.split()]
    ray_angles = {int(ln.split()[0]): float(ln.split()[1]) for ln in block("ray_angles")}
    windings = {int(ln.split()[0]): int(ln.split()[1]) for ln in block("windings")}
    body = text.split("subject to\n", 1)[1]
    eq_part, ineq_part = body.split("inequalities\n", 1)
    ineq_part = ineq_part.split("end;", 1)[0]
    equations = [ln.strip() for ln in eq_part.splitlines() if ln.strip()]
    inequalities = [ln.strip() for ln in ineq_part.splitlines() if ln.strip()]
    notes = [
        ln.split("# note: ", 1)[1]
        for ln in text.splitlines()
        if ln.startswith("# note: ")
    ]
    return W3System(primes, rays, ray_angles, windings, equations, inequalities, notes)
