"""Passive optical elements and the ten canonical maximally entangled states."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fock import DIM, ModeIndex, Polarization, Spatial, ket, lift_unitary

TWO_PI = 2 * np.pi


class ElementKind(str, enum.Enum):
    BS = "BS"
    PBS = "PBS"
    PIPS = "PIPS"
    PDPS = "PDPS"
    PR = "PR"


BOTH = "both"


@dataclass(frozen=True)
class ElementSpec:
    """A passive optical element.

    ``angle`` is the phase (PIPS, PDPS), rotation angle (PR) or mixing angle
    (BS, default pi/4 for the balanced splitter). ``target`` is ``"L"``,
    ``"R"`` or ``"both"``; BS and PBS always act on both spatial modes.
    """

    kind: ElementKind
    angle: float | None = None
    target: str = BOTH
    polarization: Polarization | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ElementKind(self.kind))
        if self.target not in ("L", "R", BOTH):
            raise ValueError(f"target must be L, R or both, not {self.target!r}")
        if self.polarization is not None:
            object.__setattr__(self, "polarization", Polarization(self.polarization))
        if self.kind is ElementKind.PDPS and self.polarization is None:
            raise ValueError("PDPS needs a polarization")
        if self.kind in (ElementKind.PIPS, ElementKind.PDPS, ElementKind.PR):
            if self.angle is None:
                raise ValueError(f"{self.kind.value} needs an angle")
            object.__setattr__(self, "angle", float(self.angle) % TWO_PI)

    @property
    def label(self) -> str:
        if self.kind in (ElementKind.BS, ElementKind.PBS):
            if self.kind is ElementKind.BS and self.angle is not None and not np.isclose(self.angle, np.pi / 4):
                return f"BS({_fmt_angle(self.angle)})"
            return self.kind.value
        where = "both modes" if self.target == BOTH else self.target
        if self.kind is ElementKind.PDPS:
            arrow = "↑" if self.polarization is Polarization.UP else "↓"
            where = f"{where}{arrow}" if self.target != BOTH else f"both modes, {arrow}"
        return f"{self.kind.value}({_fmt_angle(self.angle)}, {where})"


def _fmt_angle(a: float) -> str:
    for num, den in ((1, 1), (1, 2), (3, 2), (1, 4), (3, 4)):
        if np.isclose(a, num * np.pi / den):
            head = "π" if num == 1 else f"{num}π"
            return head if den == 1 else f"{head}/{den}"
    return f"{a:.6g}"


def _spatial_targets(target: str) -> list[Spatial]:
    return [Spatial.L, Spatial.R] if target == BOTH else [Spatial(target)]


def beam_splitter(theta: float = np.pi / 4) -> np.ndarray:
    """|L> -> cos|L> + sin|R>, |R> -> sin|L> - cos|R>, on each polarization."""
    c, s = np.cos(theta), np.sin(theta)
    return np.kron(np.array([[c, s], [s, -c]]), np.eye(2)).astype(complex)


def polarizing_beam_splitter() -> np.ndarray:
    # Up is transmitted, down is reflected into the other spatial mode.
    u = np.eye(4, dtype=complex)
    u[[ModeIndex.L_DOWN, ModeIndex.R_DOWN]] = u[[ModeIndex.R_DOWN, ModeIndex.L_DOWN]]
    return u


def make_element(spec: ElementSpec) -> np.ndarray:
    """Single-particle 4x4 unitary for ``spec``."""
    kind = spec.kind
    if kind is ElementKind.BS:
        return beam_splitter(np.pi / 4 if spec.angle is None else spec.angle)
    if kind is ElementKind.PBS:
        return polarizing_beam_splitter()
    u = np.eye(4, dtype=complex)
    for s in _spatial_targets(spec.target):
        up, down = ModeIndex.of(s, Polarization.UP), ModeIndex.of(s, Polarization.DOWN)
        if kind is ElementKind.PIPS:
            u[up, up] = u[down, down] = np.exp(1j * spec.angle)
        elif kind is ElementKind.PDPS:
            m = ModeIndex.of(s, spec.polarization)
            u[m, m] = np.exp(1j * spec.angle)
        elif kind is ElementKind.PR:
            c, sn = np.cos(spec.angle), np.sin(spec.angle)
            u[np.ix_([up, down], [up, down])] = [[c, -sn], [sn, c]]
        else:  # pragma: no cover - enum is exhaustive
            raise ValueError(f"unknown element kind {kind}")
    return u


def lifted(spec: ElementSpec) -> np.ndarray:
    return _lifted_cached(spec)


@lru_cache(maxsize=None)
def _lifted_cached(spec: ElementSpec) -> np.ndarray:
    U = lift_unitary(make_element(spec))
    U.setflags(write=False)
    return U


BS = ElementSpec(ElementKind.BS)
PBS = ElementSpec(ElementKind.PBS)


def pips(theta: float, target: str) -> ElementSpec:
    return ElementSpec(ElementKind.PIPS, theta, target)


def pdps(theta: float, target: str, polarization: str | Polarization) -> ElementSpec:
    return ElementSpec(ElementKind.PDPS, theta, target, Polarization(polarization))


def pr(alpha: float, target: str) -> ElementSpec:
    return ElementSpec(ElementKind.PR, alpha, target)


# -- canonical states --------------------------------------------------------

@dataclass(frozen=True)
class CanonicalState:
    name: str
    vector: np.ndarray

    @property
    def family(self) -> str:
        return self.name[-2:]


_LU, _LD, _RU, _RD = (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)


def _occ(*modes: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(int(x) for x in np.sum(modes, axis=0))


def _pair(first: tuple[int, ...], second: tuple[int, ...], sign: int) -> np.ndarray:
    return ket({first: 1.0, second: float(sign)})


CANONICAL_NAMES = ("1-LR", "1+LR", "2-LR", "2+LR", "1-NO", "1+NO", "U-NO", "U+NO", "D-NO", "D+NO")


@lru_cache(maxsize=None)
def _canonical() -> tuple[CanonicalState, ...]:
    vectors = {}
    for sign, ch in ((-1, "-"), (1, "+")):
        vectors[f"1{ch}LR"] = _pair(_occ(_LU, _RD), _occ(_LD, _RU), sign)
        vectors[f"2{ch}LR"] = _pair(_occ(_LU, _RU), _occ(_LD, _RD), sign)
        vectors[f"1{ch}NO"] = _pair(_occ(_LU, _LD), _occ(_RU, _RD), sign)
        # Doubly occupied kets are unit-norm Fock states, so the 1/2 prefactor
        # of the no-label notation becomes 1/sqrt(2) here.
        vectors[f"U{ch}NO"] = _pair(_occ(_LU, _LU), _occ(_RU, _RU), sign)
        vectors[f"D{ch}NO"] = _pair(_occ(_LD, _LD), _occ(_RD, _RD), sign)
    states = []
    for name in CANONICAL_NAMES:
        v = vectors[name]
        v.setflags(write=False)
        states.append(CanonicalState(name, v))
    return tuple(states)


def canonical_states() -> list[CanonicalState]:
    """The ten basis states, LR Bell states first, then NOON states."""
    return list(_canonical())


def canonical_state(name: str) -> CanonicalState:
    for s in _canonical():
        if s.name == name:
            return s
    raise KeyError(f"unknown canonical state {name!r}; expected one of {', '.join(CANONICAL_NAMES)}")


def state(name: str) -> np.ndarray:
    return canonical_state(name).vector


@lru_cache(maxsize=None)
def _projector(family: str) -> np.ndarray:
    P = np.zeros((DIM, DIM), dtype=complex)
    for s in _canonical():
        if s.family == family:
            P += np.outer(s.vector, s.vector.conj())
    P.setflags(write=False)
    return P


def projector_LR() -> np.ndarray:
    """Projector onto the span of the four Bell states (one photon per spatial mode)."""
    return _projector("LR")


def projector_NO() -> np.ndarray:
    """Projector onto the span of the six NOON states."""
    return _projector("NO")
