"""Compile canonical classes into switching profiles and simulate them.

A target class (c1, c2, c3) factors into at most three ZZ-type gates, one
per nonzero angle.  Each factor is realized by one relaxation of the
middle qubit, using a database gate with the nearest recorded ZZ angle.
The X and Y factors are conjugated into their axes by the work-qubit
rotations of ``canonical.local_rotation``; each relaxation is followed by
the single-qubit Z-phase correction that strips the alpha/beta phase
dressing of the recorded gate, so consecutive factors compose cleanly.

Switch counting convention: one switching per (energy line, segment
boundary) pair at which that line's value changes, counted relative to an
all-Passive idle state before and after the profile.  Local operations
ride on Passive segments and cost no switchings; under this convention a
profile costs 6 switchings per relaxation, within the 21 bound for three.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from chainsynth import __version__
from chainsynth.canonical import (
    DEFAULT_ZZ_TOL,
    CanonicalClass,
    canonical_angles,
    local_rotation_factor,
    project_unitary,
)
from chainsynth.hamiltonian import CouplingPair, OnSiteEnergies, conditional_block
from chainsynth.numerics import max_entry_norm
from chainsynth.search import GateRecord

HALF_PI = math.pi / 2
LEAK_FLAG_THRESHOLD = 0.05


class Passive:
    """Symbolic 'large enough to pin qubit 2' on-site energy."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Passive"


PASSIVE = Passive()

EnergyLevel = float | Passive


@dataclass(frozen=True)
class Segment:
    e1: EnergyLevel
    e2: EnergyLevel
    e3: EnergyLevel
    duration: float
    local_ops: tuple[np.ndarray, np.ndarray] | None = None
    annotation: str = ""

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError("segment duration must be non-negative")
        if self.local_ops is not None and self.e2 is not PASSIVE:
            raise ValueError("local operations only ride on Passive segments")

    def is_active(self) -> bool:
        return self.e2 is not PASSIVE


@dataclass(frozen=True)
class SwitchingProfile:
    segments: tuple[Segment, ...]

    def __len__(self):
        return len(self.segments)


@dataclass(frozen=True)
class ProfileBuild:
    profile: SwitchingProfile
    relaxations: int
    switchings: int
    predicted_angle_error: float
    target: CanonicalClass


def lookup_nearest(db: list[GateRecord], c: float) -> GateRecord:
    """Database record with zz_angle nearest the target angle.

    Ties break toward smaller tau, then smaller leakage.
    """
    if not db:
        raise ValueError("empty gate database; run the search first")
    if not 0.0 <= c < HALF_PI:
        raise ValueError(f"target angle {c} outside [0, pi/2)")
    return min(db, key=lambda r: (abs(r.zz_angle - c), r.point.tau, r.leakage))


def _phase_correction(record: GateRecord) -> tuple[np.ndarray, np.ndarray]:
    """Single-qubit Z rotations undoing the recorded gate's phase dressing.

    Writes the diagonal of N as ``exp(i(phi + a s_a + b s_b + c s_c))``
    with sign patterns s_a = (+,+,-,-), s_b = (+,-,+,-), s_c = (+,-,-,+)
    and c the recorded angle, then returns the pair (u1, u3) of diagonal
    rotations with ``(u1 x u3) N ~ e^{i c ZZ}`` (exact when N is
    diagonal; the global phase is absorbed into u1).
    """
    c = record.zz_angle
    diag = np.array([record.alpha, record.n_entries[0],
                     record.n_entries[3], record.beta])
    d = diag * np.exp(-1j * c * np.array([1, -1, -1, 1]))
    a1, a2, a3 = np.angle(d[0]), np.angle(d[1]), np.angle(d[2])
    b = (a1 - a2) / 2
    a = (a1 - a3) / 2
    phi = a1 - a - b
    u1 = np.diag(np.exp(-1j * np.array([phi + a, phi - a])))
    u3 = np.diag(np.exp(-1j * np.array([b, -b])))
    return u1, u3


def build_profile(target: CanonicalClass, db: list[GateRecord],
                  angle_tol: float = DEFAULT_ZZ_TOL) -> ProfileBuild:
    """Compile a target canonical class into a switching profile.

    One relaxation per angle that is nonzero on the pi/2 torus; X and Y
    factors are wrapped in their conjugating local rotations, and every
    relaxation gets a Z-phase correction segment.  Angles within
    ``angle_tol`` of 0 (or pi/2, which is a local gate) emit nothing.
    """
    segments: list[Segment] = []
    relaxations = 0
    predicted_error = 0.0
    for axis, ck in zip("XYZ", (target.c1, target.c2, target.c3)):
        wrapped = min(ck % HALF_PI, HALF_PI - ck % HALF_PI)
        if wrapped <= angle_tol:
            predicted_error += wrapped
            continue
        record = lookup_nearest(db, ck % HALF_PI)
        predicted_error += abs(record.zz_angle - ck % HALF_PI)
        relaxations += 1
        corr1, corr3 = _phase_correction(record)
        if axis != "Z":
            r = local_rotation_factor(axis)
            segments.append(Segment(
                PASSIVE, PASSIVE, PASSIVE, 0.0, (r, r),
                f"{axis}-factor basis change (enter)",
            ))
        segments.append(Segment(
            record.point.energies.e1,
            record.point.energies.e2,
            record.point.energies.e3,
            record.point.tau,
            None,
            f"{axis}-factor relaxation, zz_angle={record.zz_angle:.6f}",
        ))
        segments.append(Segment(
            PASSIVE, PASSIVE, PASSIVE, 0.0, (corr1, corr3),
            f"{axis}-factor phase correction",
        ))
        if axis != "Z":
            r = local_rotation_factor(axis)
            segments.append(Segment(
                PASSIVE, PASSIVE, PASSIVE, 0.0,
                (r.conj().T, r.conj().T),
                f"{axis}-factor basis change (exit)",
            ))
    profile = SwitchingProfile(tuple(segments))
    return ProfileBuild(
        profile=profile,
        relaxations=relaxations,
        switchings=count_switchings(profile),
        predicted_angle_error=predicted_error,
        target=target,
    )


def count_switchings(profile: SwitchingProfile) -> int:
    """Energy-line changes over all boundaries, idle state Passive."""
    count = 0
    prev = (PASSIVE, PASSIVE, PASSIVE)
    for seg in profile.segments:
        state = (seg.e1, seg.e2, seg.e3)
        count += sum(1 for p, s in zip(prev, state) if p is not s and p != s)
        prev = state
    idle = (PASSIVE, PASSIVE, PASSIVE)
    count += sum(1 for p, s in zip(prev, idle) if p is not s and p != s)
    return count


@dataclass(frozen=True)
class SimulationResult:
    gate: np.ndarray
    cls: CanonicalClass
    flagged_segments: tuple[int, ...]

    def class_error_vs(self, target: CanonicalClass) -> float:
        return self.cls.distance(target)


def simulate_profile(profile: SwitchingProfile, couplings: CouplingPair,
                     mode: str = "ideal",
                     passive_scale: float = 1e3) -> SimulationResult:
    """Compose a profile segment by segment into its two-qubit gate.

    Active segments use the exact conditional (q2 = |0>) block of the 8x8
    propagator.  Passive segments apply their local operations exactly;
    in ``mode="physical"`` they additionally evolve the chain with the
    middle qubit pinned at ``passive_scale * max|J|``, quantifying the
    idealization error.  Active segments leaking above 0.05 are flagged
    (the gate is still returned).
    """
    if mode not in ("ideal", "physical"):
        raise ValueError(f"unknown simulation mode {mode!r}")
    gate = np.eye(4, dtype=complex)
    flagged = []
    for idx, seg in enumerate(profile.segments):
        if seg.is_active():
            block = conditional_block(
                OnSiteEnergies(seg.e1, seg.e2, seg.e3), couplings, seg.duration
            )
            leak = _block_leakage(block)
            if leak > LEAK_FLAG_THRESHOLD:
                flagged.append(idx)
            step = block
        else:
            step = np.eye(4, dtype=complex)
            if mode == "physical" and seg.duration > 0:
                e_pin = passive_scale * max(abs(couplings.j12), abs(couplings.j23))
                step = conditional_block(
                    OnSiteEnergies(0.0, e_pin, 0.0), couplings, seg.duration
                ) @ step
            if seg.local_ops is not None:
                u1, u3 = seg.local_ops
                step = np.kron(u1, u3) @ step
        gate = step @ gate
    unitary, _ = project_unitary(gate)
    return SimulationResult(
        gate=gate,
        cls=canonical_angles(unitary),
        flagged_segments=tuple(flagged),
    )


def _block_leakage(block: np.ndarray) -> float:
    return max_entry_norm(block.conj().T @ block - np.eye(4))


# ---------------------------------------------------------------------------
# profile files


def _level_to_json(level: EnergyLevel):
    return "Passive" if level is PASSIVE else level


def _level_from_json(value):
    return PASSIVE if value == "Passive" else float(value)


def _ops_to_json(ops):
    if ops is None:
        return None
    return [[[[z.real, z.imag] for z in row] for row in np.asarray(op)]
            for op in ops]


def _ops_from_json(data):
    if data is None:
        return None
    u1, u3 = (
        np.array([[complex(re, im) for re, im in row] for row in op])
        for op in data
    )
    return u1, u3


def write_profile(path, build: ProfileBuild, couplings: CouplingPair,
                  db_digest: str = "") -> None:
    doc = {
        "kind": "chainsynth-profile",
        "version": __version__,
        "j12": couplings.j12,
        "j23": couplings.j23,
        "db_digest": db_digest,
        "target": [build.target.c1, build.target.c2, build.target.c3],
        "predicted_angle_error": build.predicted_angle_error,
        "relaxations": build.relaxations,
        "switchings": build.switchings,
        "segments": [
            {
                "e1": _level_to_json(seg.e1),
                "e2": _level_to_json(seg.e2),
                "e3": _level_to_json(seg.e3),
                "duration": seg.duration,
                "local_ops": _ops_to_json(seg.local_ops),
                "annotation": seg.annotation,
            }
            for seg in build.profile.segments
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_profile(path) -> tuple[ProfileBuild, CouplingPair]:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("kind") != "chainsynth-profile":
        raise ValueError(f"{path}: not a chainsynth profile")
    segments = tuple(
        Segment(
            _level_from_json(s["e1"]),
            _level_from_json(s["e2"]),
            _level_from_json(s["e3"]),
            s["duration"],
            _ops_from_json(s["local_ops"]),
            s.get("annotation", ""),
        )
        for s in doc["segments"]
    )
    build = ProfileBuild(
        profile=SwitchingProfile(segments),
        relaxations=doc["relaxations"],
        switchings=doc["switchings"],
        predicted_angle_error=doc["predicted_angle_error"],
        target=CanonicalClass(*doc["target"]),
    )
    return build, CouplingPair(doc["j12"], doc["j23"])


def database_digest(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()
