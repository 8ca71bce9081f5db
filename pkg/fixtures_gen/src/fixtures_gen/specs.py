"""Declarative table of every committed fixture and operator pool."""

from dataclasses import dataclass, field

import numpy as np


def diatomic(el1, el2, r):
    return [(el1, (0.0, 0.0, -r / 2)), (el2, (0.0, 0.0, r / 2))]


def water(r=0.958, angle=104.478):
    half = np.radians(angle) / 2
    x, z = r * np.sin(half), r * np.cos(half)
    return [("O", (0.0, 0.0, 0.0)), ("H", (x, 0.0, z)), ("H", (-x, 0.0, z))]


def ammonia(r=1.012, angle=106.67):
    c = np.cos(np.radians(angle))
    rho = r * np.sqrt(2.0 * (1.0 - c) / 3.0)
    z = -r * np.sqrt((1.0 + 2.0 * c) / 3.0)
    out = [("N", (0.0, 0.0, 0.0))]
    for k in range(3):
        th = 2.0 * np.pi * k / 3.0
        out.append(("H", (rho * np.cos(th), rho * np.sin(th), z)))
    return out


def methane(r=1.087):
    s = r / np.sqrt(3.0)
    return [("C", (0.0, 0.0, 0.0)),
            ("H", (s, s, s)), ("H", (s, -s, -s)),
            ("H", (-s, s, -s)), ("H", (-s, -s, s))]


def beh2(r=1.326):
    return [("H", (0.0, 0.0, -r)), ("Be", (0.0, 0.0, 0.0)),
            ("H", (0.0, 0.0, r))]


@dataclass
class FixtureSpec:
    name: str
    atoms: list                 # [(element, xyz_angstrom)]
    basis: str
    mapping: str                # "jw" or "parity"
    frozen: list = field(default_factory=list)
    adapt: bool = True          # resolve degenerate MO blocks by moments
    emit_irrep: bool = False
    molecule: str = ""
    # geometries converged first to steer SCF onto the ground branch
    guess_chain: list = field(default_factory=list)


@dataclass
class PoolSpec:
    name: str
    n_spatial: int              # active spatial orbitals
    n_alpha: int
    n_beta: int
    mapping: str
    molecule: str = ""


def _n2(r):
    chain = [diatomic("N", "N", round(0.9 + 0.1 * k, 1))
             for k in range(int(round((r - 0.9) / 0.1)))]
    return FixtureSpec(
        name=f"n2_sto3g_r{r:.1f}", atoms=diatomic("N", "N", r),
        basis="sto-3g", mapping="jw", frozen=[0, 1], emit_irrep=True,
        molecule="N2", guess_chain=chain)


FIXTURES = (
    [_n2(round(0.9 + 0.1 * k, 1)) for k in range(13)]
    + [
        FixtureSpec("lih_sto3g_r1.59", diatomic("Li", "H", 1.59),
                    "sto-3g", "parity", [0], molecule="LiH"),
        FixtureSpec("lih_sto3g_r2.5", diatomic("Li", "H", 2.5),
                    "sto-3g", "parity", [0], molecule="LiH"),
        FixtureSpec("beh2_sto3g_r1.326", beh2(1.326),
                    "sto-3g", "parity", [0], molecule="BeH2"),
        FixtureSpec("h2o_sto3g_r0.958", water(0.958),
                    "sto-3g", "parity", [0], molecule="H2O"),
        FixtureSpec("h2_sto3g_r0.735", diatomic("H", "H", 0.735),
                    "sto-3g", "jw", [], molecule="H2"),
        FixtureSpec("h2o_sto6g", water(), "sto-6g", "jw", [0],
                    molecule="H2O"),
        # raw degenerate eigenvectors on purpose: mixes the e-type MOs
        FixtureSpec("nh3_sto6g", ammonia(), "sto-6g", "jw", [0],
                    adapt=False, molecule="NH3"),
        FixtureSpec("ch4_sto6g", methane(), "sto-6g", "jw", [0],
                    molecule="CH4"),
    ]
)

POOLS = [
    PoolSpec("pool_h2_sto3g", 2, 1, 1, "jw", molecule="H2"),
    PoolSpec("pool_lih_sto3g", 5, 1, 1, "parity", molecule="LiH"),
    PoolSpec("pool_beh2_sto3g", 6, 2, 2, "parity", molecule="BeH2"),
    PoolSpec("pool_h2o_sto3g", 6, 4, 4, "parity", molecule="H2O"),
]
