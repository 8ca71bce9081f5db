"""STO-nG basis sets for H through O.

Shell expansions are stored for a unit Slater exponent and rescaled per
element as alpha -> zeta^2 * alpha.  The 2sp expansions share one set of
gaussian exponents between the 2s and 2p contractions.  The six-term 2sp
table was produced by fit_sp_expansion below (least squares against the
Slater radials on a quadrature grid); the fitter stays in the module so
tests can confirm it reproduces the three- and six-term 1s tables.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

STO3G_1S = (
    (2.227660584, 0.4057711562, 0.1098175104),
    (0.1543289673, 0.5353281423, 0.4446345422),
)
STO3G_2SP = (
    (0.9942030994, 0.2310313333, 0.0751386016),
    (-0.09996723, 0.39951283, 0.70011547),
    (0.15591627, 0.60768372, 0.39195739),
)
STO6G_1S = (
    (23.10303149, 4.235915534, 1.185056519,
     0.4070988982, 0.1580884151, 0.06510953954),
    (0.009163596281, 0.04936149294, 0.1685383049,
     0.3705627997, 0.4164915298, 0.1303340841),
)
STO6G_2SP = (
    (10.3086932777, 2.0403594607, 0.6341422092,
     0.2439773671, 0.1059595377, 0.0485690089),
    (-0.0132527753, -0.0469916634, -0.0337853355,
     0.2502415344, 0.5951166490, 0.2407059375),
    (0.0037596946, 0.0376793480, 0.1738966393,
     0.4180361781, 0.4258592858, 0.1017082355),
)

# per-element Slater scale factors (1s, 2sp) and nuclear charge
SCALES = {
    "H": (1.24, None),
    "Li": (2.69, 0.80),
    "Be": (3.68, 1.15),
    "C": (5.67, 1.72),
    "N": (6.67, 1.95),
    "O": (7.66, 2.25),
}
CHARGES = {"H": 1, "Li": 3, "Be": 4, "C": 6, "N": 7, "O": 8}

_TABLES = {
    "sto-3g": (STO3G_1S, STO3G_2SP),
    "sto-6g": (STO6G_1S, STO6G_2SP),
}


def primitive_norm(alpha, lmn):
    """Normalization constant of a Cartesian gaussian primitive."""
    l, m, n = lmn
    df = _dfact(2 * l - 1) * _dfact(2 * m - 1) * _dfact(2 * n - 1)
    return ((2.0 * alpha / np.pi) ** 0.75
            * (4.0 * alpha) ** ((l + m + n) / 2.0) / np.sqrt(df))


def _dfact(k):
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


@dataclass
class BasisFunction:
    """One contracted Cartesian gaussian; coeffs apply to normalized primitives."""

    center: np.ndarray
    lmn: tuple
    alphas: np.ndarray
    coeffs: np.ndarray
    atom_index: int = field(default=-1)

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.alphas = np.asarray(self.alphas, dtype=float)
        norms = np.array([primitive_norm(a, self.lmn) for a in self.alphas])
        raw = np.asarray(self.coeffs, dtype=float) * norms
        # renormalize the contraction: same-center overlap has a closed form
        l, m, n = self.lmn
        L = l + m + n
        df = _dfact(2 * l - 1) * _dfact(2 * m - 1) * _dfact(2 * n - 1)
        ps = self.alphas[:, None] + self.alphas[None, :]
        s = df * (np.pi / ps) ** 1.5 / (2.0 * ps) ** L
        norm2 = raw @ s @ raw
        self.coeffs = raw / np.sqrt(norm2)


def build_basis(atoms, name):
    """Return the AO list for atoms = [(element, xyz_bohr), ...].

    AO order per atom: 1s, then 2s, 2px, 2py, 2pz for non-hydrogen.
    """
    key = name.lower()
    if key not in _TABLES:
        raise ValueError(f"unknown basis {name!r}")
    tab_1s, tab_2sp = _TABLES[key]
    aos = []
    for idx, (el, xyz) in enumerate(atoms):
        if el not in SCALES:
            raise ValueError(f"no parameters for element {el!r}")
        z1, z2 = SCALES[el]
        a1 = np.asarray(tab_1s[0]) * z1**2
        aos.append(BasisFunction(xyz, (0, 0, 0), a1, tab_1s[1], idx))
        if z2 is not None:
            asp = np.asarray(tab_2sp[0]) * z2**2
            aos.append(BasisFunction(xyz, (0, 0, 0), asp, tab_2sp[1], idx))
            for lmn in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                aos.append(BasisFunction(xyz, lmn, asp, tab_2sp[2], idx))
    return aos


# -- expansion fitting (kept for validation of the frozen tables) --

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(500)
_R = 15.0 * (_NODES + 1.0)
_W = 15.0 * _WEIGHTS


def _design_s(alphas):
    a = np.asarray(alphas)[:, None]
    return (2.0 * a / np.pi) ** 0.75 * np.exp(-a * _R[None, :] ** 2)


def _design_p(alphas):
    a = np.asarray(alphas)[:, None]
    npf = (2.0 * a / np.pi) ** 0.75 * 2.0 * np.sqrt(a)
    return npf * _R[None, :] * np.exp(-a * _R[None, :] ** 2)


def _slater_radial(kind):
    if kind == "1s":
        return np.sqrt(1.0 / np.pi) * np.exp(-_R)
    if kind == "2s":
        return np.sqrt(1.0 / (3.0 * np.pi)) * _R * np.exp(-_R)
    if kind == "2p":
        return np.sqrt(1.0 / np.pi) * _R * np.exp(-_R)
    raise ValueError(kind)


def _lsq(design, target, weight):
    A = design.T * np.sqrt(weight)[:, None]
    b = target * np.sqrt(weight)
    c = np.linalg.lstsq(A, b, rcond=None)[0]
    r = A @ c - b
    return c, float(r @ r)


def fit_s_expansion(n, x0=None):
    """Least-squares n-gaussian expansion of the unit-exponent 1s Slater."""
    w = 4.0 * np.pi * _W * _R**2
    t = _slater_radial("1s")

    def obj(logs):
        return _lsq(_design_s(np.exp(logs)), t, w)[1]

    if x0 is None:
        x0 = np.geomspace(0.08, 30.0 if n == 6 else 3.0, n)
    out = minimize(obj, np.log(np.asarray(x0)), method="Nelder-Mead",
                   options={"maxiter": 20000, "xatol": 1e-13, "fatol": 1e-15})
    a = np.sort(np.exp(out.x))[::-1]
    c, _ = _lsq(_design_s(a), t, w)
    return a, c


def fit_sp_expansion(n, x0=None):
    """Shared-exponent n-gaussian expansion of the 2s and 2p Slater radials."""
    ws = 4.0 * np.pi * _W * _R**2
    wp = (4.0 * np.pi / 3.0) * _W * _R**2
    ts = _slater_radial("2s")
    tp = _slater_radial("2p")

    def obj(logs):
        a = np.exp(logs)
        return _lsq(_design_s(a), ts, ws)[1] + _lsq(_design_p(a), tp, wp)[1]

    if x0 is None:
        x0 = np.geomspace(0.05, 1.5 if n == 3 else 12.0, n)
    out = minimize(obj, np.log(np.asarray(x0)), method="Nelder-Mead",
                   options={"maxiter": 40000, "xatol": 1e-13, "fatol": 1e-15})
    a = np.sort(np.exp(out.x))[::-1]
    cs, _ = _lsq(_design_s(a), ts, ws)
    cp, _ = _lsq(_design_p(a), tp, wp)
    return a, cs, cp
