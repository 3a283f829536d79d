"""Pulse-sequence assembly.

A sequence is an ordered list of three element kinds: instantaneous hard
rotations, free-evolution delays (optionally with decoupled spins), and
shaped intervals during which a sampled control drives selected spins while
all couplings evolve.  Durations are in units of 1/(pi J); hard pulses are
ideal (zero duration).

The shaped sequences need two zero-duration alignment rotations that the
schematic picture of the method leaves implicit: after the opening
rectangular pulse the in-plane angle of the active window sits at
f1*tau1 < pi/2, and a hard rotation on the same spin closes the gap (and
symmetrically before the closing pulse).  Without them the window hands a
misaligned state to the next step; with them the end-to-end transfer is
exact.  See tests/test_acceptance.py.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dynamics import ControlPulse
from .geodesic import GeodesicSolution
from .operators import ChainSpec

HALF_PI = np.pi / 2.0

_AXES = {"x", "y", "z", "-x", "-y", "-z"}


@dataclass(frozen=True)
class HardPulse:
    """Ideal instantaneous rotation by ``angle`` about ``axis`` on ``spins``."""

    spins: tuple[int, ...]
    axis: str
    angle: float

    def __post_init__(self):
        if self.axis not in _AXES:
            raise ValueError(f"axis must be one of {sorted(_AXES)}")
        if not self.spins:
            raise ValueError("hard pulse needs at least one spin")

    duration = 0.0


@dataclass(frozen=True)
class Delay:
    """Free evolution under the couplings; bonds touching decoupled spins are off."""

    duration: float
    decoupled: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError("negative delay")
        object.__setattr__(self, "decoupled", frozenset(self.decoupled))


@dataclass(frozen=True)
class ShapedInterval:
    """Sampled y-control on ``spins`` with couplings evolving throughout."""

    pulse: ControlPulse
    spins: tuple[int, ...]
    axis: str = "y"

    @property
    def duration(self) -> float:
        return self.pulse.duration


Element = HardPulse | Delay | ShapedInterval


@dataclass(frozen=True)
class PulseSequence:
    chain: ChainSpec
    elements: tuple[Element, ...]
    annotation: str = ""

    def __post_init__(self):
        for el in self.elements:
            spins = getattr(el, "spins", ())
            bad = [s for s in spins if not 1 <= s <= self.chain.n]
            if bad:
                raise ValueError(f"element addresses spins {bad} outside chain n={self.chain.n}")
            for s in getattr(el, "decoupled", ()):
                if not 1 <= s <= self.chain.n:
                    raise ValueError(f"decoupled spin {s} outside chain")

    @property
    def total_duration(self) -> float:
        return float(sum(el.duration for el in self.elements))

    def to_json_dict(self) -> dict:
        return {
            "chain": {"n": self.chain.n, "J_hz": self.chain.coupling},
            "annotation": self.annotation,
            "duration_units": "1/(pi J)",
            "total_duration": self.total_duration,
            "elements": [_element_to_dict(el) for el in self.elements],
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)


def _element_to_dict(el: Element) -> dict:
    if isinstance(el, HardPulse):
        return {"type": "hard", "spins": list(el.spins), "axis": el.axis,
                "angle": el.angle}
    if isinstance(el, Delay):
        return {"type": "delay", "duration": el.duration,
                "decoupled": sorted(el.decoupled)}
    return {"type": "shaped", "spins": list(el.spins), "axis": el.axis,
            "duration": el.duration,
            "samples": [{"t": float(t), "u": float(u)}
                        for t, u in zip(el.pulse.times, el.pulse.values)]}


def element_from_dict(d: dict) -> Element:
    kind = d["type"]
    if kind == "hard":
        return HardPulse(tuple(d["spins"]), d["axis"], d["angle"])
    if kind == "delay":
        return Delay(d["duration"], frozenset(d.get("decoupled", ())))
    if kind == "shaped":
        t = np.array([s["t"] for s in d["samples"]])
        u = np.array([s["u"] for s in d["samples"]])
        return ShapedInterval(ControlPulse(t, u), tuple(d["spins"]), d.get("axis", "y"))
    raise ValueError(f"unknown element type {kind!r}")


def sequence_from_json_dict(d: dict) -> PulseSequence:
    chain = ChainSpec(d["chain"]["n"], d["chain"].get("J_hz", 1.0))
    elements = tuple(element_from_dict(e) for e in d["elements"])
    return PulseSequence(chain, elements, d.get("annotation", ""))


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def conventional_cascade(n: int, coupling: float = 1.0) -> PulseSequence:
    """Hard-pulse cascade creating n-spin order in (n-1) couplings of 1/(2J):
    a pi/2 delay, then alternating (pi/2)_y pulses on spins 2..n-1 and
    further pi/2 delays."""
    chain = ChainSpec(n, coupling)
    elements: list[Element] = [Delay(HALF_PI)]
    for k in range(2, n):
        elements.append(HardPulse((k,), "y", HALF_PI))
        elements.append(Delay(HALF_PI))
    return PulseSequence(chain, tuple(elements),
                         annotation=f"conventional order creation I1x -> n={n} spin order")


def geodesic_order_sequence(n: int, solutions: dict[str, GeodesicSolution],
                            coupling: float = 1.0,
                            pulse_samples: int = 1001) -> PulseSequence:
    """Shaped-pulse order creation: a rectangular pulse of duration tau1 on
    spin 2, shaped pulses of duration tau2 on spins 3..n-2 back to back, and
    a final rectangular pulse of duration tau1 on spin n-1, with the two
    zero-duration alignment rotations described in the module docstring.

    Total duration 2*tau1 + (n-4)*tau2.
    """
    if n < 4:
        raise ValueError("shaped order creation needs n >= 4")
    for key in ("first", "intermediate", "last"):
        if key not in solutions:
            raise ValueError(f"missing {key!r} solution")
    first, mid, last = solutions["first"], solutions["intermediate"], solutions["last"]
    chain = ChainSpec(n, coupling)
    align = HALF_PI - first.theta_end
    elements: list[Element] = [
        ShapedInterval(first.pulse.resample(pulse_samples), (2,)),
        HardPulse((2,), "y", align),
    ]
    mid_pulse = mid.pulse.resample(pulse_samples)
    for s in range(3, n - 1):
        elements.append(ShapedInterval(mid_pulse, (s,)))
    elements.append(HardPulse((n - 1,), "y", last.theta0))
    elements.append(ShapedInterval(last.pulse.resample(pulse_samples), (n - 1,)))
    return PulseSequence(chain, tuple(elements),
                         annotation=f"shaped order creation I1x -> n={n} spin order")


def inept_cascade(n: int, coupling: float = 1.0) -> PulseSequence:
    """Concatenated coherence transfer I1x -> Inx: each step is a hard pi/2
    rotation generated by I_ky + I_(k+1)y followed by a 1/(2J) delay, which
    advances the two-spin operator 2 I_kx I_(k+1)z one site; plus the
    preparation and collapse blocks at the ends."""
    chain = ChainSpec(n, coupling)
    elements: list[Element] = [
        Delay(HALF_PI),
        HardPulse((1,), "z", -HALF_PI),
    ]
    for k in range(1, n - 1):
        elements.append(HardPulse((k, k + 1), "y", HALF_PI))
        elements.append(Delay(HALF_PI))
    # collapse the antiphase term onto the end spin
    elements.append(HardPulse((n - 1, n), "y", HALF_PI))
    elements.append(Delay(HALF_PI))
    elements.append(HardPulse((n,), "z", HALF_PI))
    return PulseSequence(chain, tuple(elements),
                         annotation=f"concatenated coherence transfer I1x -> I{n}x")


def soliton_preparation(n: int = 6, coupling: float = 1.0) -> PulseSequence:
    """Prepare the four-term soliton operator at site 1 from I1x.

    Cascade to the three-spin x-operator, a quarter-period split, a
    (pi/2)_x on spin 1, and a quarter period with spin 4 decoupled.  The
    result is soliton_operator(1); total duration 3*pi/2.  Not claimed
    time-optimal.
    """
    if n < 5:
        raise ValueError("soliton preparation needs n >= 5")
    chain = ChainSpec(n, coupling)
    elements = (
        Delay(HALF_PI),
        HardPulse((2,), "y", HALF_PI),
        Delay(HALF_PI),
        HardPulse((3,), "y", HALF_PI),
        Delay(HALF_PI / 2),
        HardPulse((1,), "x", HALF_PI),
        Delay(HALF_PI / 2, decoupled=frozenset({4})),
    )
    return PulseSequence(chain, elements, annotation="soliton preparation from I1x at site 1")


def soliton_propagation_step(k: int, intermediate: GeodesicSolution, n: int,
                             coupling: float = 1.0,
                             pulse_samples: int = 1001) -> PulseSequence:
    """Advance the soliton at site k one site: a single shaped interval of
    duration tau2 driving spins k+1 and k+3 while all couplings evolve."""
    if k + 4 > n:
        raise ValueError(f"step at k={k} needs n >= {k + 4}")
    chain = ChainSpec(n, coupling)
    el = ShapedInterval(intermediate.pulse.resample(pulse_samples), (k + 1, k + 3))
    return PulseSequence(chain, (el,),
                         annotation=f"soliton advance site {k} -> {k+1}")


def pair_encoding(intermediate: GeodesicSolution, n: int = 8, coupling: float = 1.0,
                  pulse_samples: int = 1001) -> PulseSequence:
    """Encode the transverse pair (I1y, I1x) into the solitons anchored at
    sites 1 and 3.

    A (pi/2)_-x on spin 1 parks I1y as -I1z, the soliton preparation carries
    I1x to the site-1 soliton (and the parked component to a two-term
    superposition), two shaped advances move it out to site 3, then a (pi/2)_y on
    spin 1 and a quarter period with spins 4 and 6 decoupled complete the
    second soliton without touching the first.  The axis of the closing
    spin-1 pulse is the one that lands both registers with positive sign;
    fixed by simulation, see tests.
    """
    if n < 7:
        raise ValueError("pair encoding needs n >= 7")
    chain = ChainSpec(n, coupling)
    prep = soliton_preparation(n, coupling).elements
    mid_pulse = intermediate.pulse.resample(pulse_samples)
    elements = (
        (HardPulse((1,), "-x", HALF_PI),)
        + prep
        + (
            ShapedInterval(mid_pulse, (2, 4)),
            ShapedInterval(mid_pulse, (3, 5)),
            HardPulse((1,), "y", HALF_PI),
            Delay(HALF_PI / 2, decoupled=frozenset({4, 6})),
        )
    )
    return PulseSequence(chain, elements,
                         annotation="pair encoding (I1y, I1x) -> solitons at sites 1 and 3")


def pair_propagation_step(k: int, intermediate: GeodesicSolution, n: int = 8,
                          coupling: float = 1.0,
                          pulse_samples: int = 1001) -> PulseSequence:
    """Advance the soliton pair at sites k and k+2 one site in a single
    shaped interval driving spins k+1, k+3 and k+5."""
    if k + 6 > n:
        raise ValueError(f"pair step at k={k} needs n >= {k + 6}")
    chain = ChainSpec(n, coupling)
    el = ShapedInterval(intermediate.pulse.resample(pulse_samples),
                        (k + 1, k + 3, k + 5))
    return PulseSequence(chain, (el,),
                         annotation=f"pair advance sites ({k}, {k+2}) -> ({k+1}, {k+3})")
