"""Residual oracles for the order-0 and order-1 solutions.

Nothing here reuses the elimination that produced the closed-form
coefficients. Fields are evaluated from the analytic formulas and checked
against the governing mode ODE, the transparent boundary conditions at
``z+``/``z-``, and the jump and divergence conditions at ``z = 0``.
Derivatives in z are analytic except in :func:`ode_residual`, which uses
finite differences on purpose.

The per-mode linear systems are assembled generically. Each condition is
an affine functional of the unknown amplitudes; its matrix columns are
obtained by evaluating the functional at unit vectors.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .forward import FirstOrderSolution, solve_first_order
from .physics import GratingConfig, _side, fresnel, mode_values, zeroth_order, zeroth_order_derivative
from .spectral import SurfaceProfile

__all__ = [
    "CheckResult",
    "ResidualReport",
    "ODE_TOL",
    "ALGEBRAIC_TOL",
    "capacity_apply",
    "ode_residual",
    "boundary_residual",
    "jump_residual",
    "divergence_residual",
    "assemble_interface_system",
    "assemble_full_system",
    "solve_mode_system",
    "full_report",
]

ODE_TOL = 1e-6
ALGEBRAIC_TOL = 1e-10
FD_STEP = 1e-4  # in wavelengths
N_ZSAMPLES = 41


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    mode: tuple | None = None
    worst: list = field(default_factory=list, repr=False)

    @property
    def passed(self):
        return bool(self.residual <= self.tolerance)

    def line(self):
        mode = "-" if self.mode is None else f"({self.mode[0]},{self.mode[1]})"
        flag = "PASS" if self.passed else "FAIL"
        return f"{self.name:<28s} mode={mode:<10s} residual={self.residual:.3e} tol={self.tolerance:.0e} {flag}"


@dataclass
class ResidualReport:
    checks: list = field(default_factory=list)

    def add(self, check: CheckResult):
        self.checks.append(check)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def worst(self, name):
        cs = [c for c in self.checks if c.name == name]
        return max(cs, key=lambda c: c.residual) if cs else None

    def summary(self):
        """Worst case per check name, in first-seen order."""
        names = list(dict.fromkeys(c.name for c in self.checks))
        out = []
        for name in names:
            cs = [c for c in self.checks if c.name == name]
            w = max(cs, key=lambda c: c.residual)
            offenders = sorted(cs, key=lambda c: -c.residual)[:5]
            out.append(CheckResult(name, w.residual, w.tolerance, w.mode,
                                   [(c.mode, c.residual) for c in offenders]))
        return out

    def to_text(self):
        return "\n".join(c.line() for c in self.summary())


def _rel(terms):
    """``|sum(terms)| / max|term|``; exactly 0 when every term vanishes."""
    terms = [complex(t) for t in terms]
    scale = max(abs(t) for t in terms)
    if scale == 0:
        return 0.0
    return abs(sum(terms)) / scale


# --------------------------------------------------------------------------
# capacity operator

def capacity_apply(u1, u2, side, basis_or_mode, cfg: GratingConfig | None = None):
    """Capacity operator in omega*mu scaled form, mode-wise.

    ``basis_or_mode`` is either a :class:`ModeBasis` (then ``u1``, ``u2``
    are grid-shaped coefficient arrays) or a mode ``n`` together with
    ``cfg``.
    """
    s = _side(side)
    if cfg is not None:
        a1, a2, bp, bm = mode_values(basis_or_mode, cfg.grid.period1, cfg.grid.period2,
                                     cfg.kappa_plus, cfg.kappa_minus)
        k = cfg.kappa(s)
    else:
        b = basis_or_mode
        a1, a2, bp, bm = b.alpha1, b.alpha2, b.beta_plus, b.beta_minus
        k = b.kappa_plus if s == "above" else b.kappa_minus
    beta = bp if s == "above" else bm
    u1 = np.asarray(u1, dtype=complex)
    u2 = np.asarray(u2, dtype=complex)
    v1 = ((k**2 - a2**2) * u1 + a1 * a2 * u2) / beta
    v2 = ((k**2 - a1**2) * u2 + a1 * a2 * u1) / beta
    return v1, v2


# --------------------------------------------------------------------------
# per-mode field model

class _ModeField:
    """Order-0 or order-1 field of one mode with explicit amplitudes.

    Above: ``A_j e^{i b+ z} + B_j e^{-i b+ (z - z+)}`` plus the particular term.
    Below: ``A_j e^{i b- (z - z-)} + B_j e^{-i b- z}`` plus the particular term.
    The shifted exponentials stay bounded on each layer, which keeps the
    generic dense solve well conditioned for evanescent modes.
    """

    def __init__(self, cfg, n, order, psi_n, amps):
        self.cfg = cfg
        self.n = n
        self.order = order
        self.psi = complex(psi_n)
        self.a1, self.a2, self.bp, self.bm = mode_values(
            n, cfg.grid.period1, cfg.grid.period2, cfg.kappa_plus, cfg.kappa_minus)
        self.amps = amps  # dict side -> (A[3], B[3])
        self.fp = fresnel(cfg)

    def _particular(self, side, j, z):
        cfg = self.cfg
        if self.order == 0:
            if tuple(self.n) != (0, 0):
                return 0j, 0j
            e = zeroth_order(cfg, z, side)[j - 1]
            de = zeroth_order_derivative(cfg, z, side)[j - 1]
            return complex(e), complex(de)
        if j == 3:
            return 0j, 0j
        pj = cfg.p[j - 1]
        if side == "above":
            k, zp, r = cfg.kappa_plus, cfg.z_plus, self.fp.r
            em, ep = np.exp(-1j * k * z), np.exp(1j * k * z)
            pre = -1j * k * pj / zp * self.psi
            e = pre * (zp - z) * (em - r * ep)
            de = pre * (-(em - r * ep) - 1j * k * (zp - z) * (em + r * ep))
            return e, de
        k, zm, t = cfg.kappa_minus, cfg.z_minus, self.fp.t
        em = np.exp(-1j * k * z)
        pre = -1j * k * pj * t / zm * self.psi
        return pre * (zm - z) * em, pre * (-em - 1j * k * (zm - z) * em)

    def value(self, side, j, z):
        """``(E, dE/dz)`` of component ``j`` at height ``z``."""
        A, B = self.amps[side]
        e, de = self._particular(side, j, z)
        if side == "above":
            b, zp = self.bp, self.cfg.z_plus
            up, dn = np.exp(1j * b * z), np.exp(-1j * b * (z - zp))
        else:
            b, zm = self.bm, self.cfg.z_minus
            up, dn = np.exp(1j * b * (z - zm)), np.exp(-1j * b * z)
        e = e + A[j - 1] * up + B[j - 1] * dn
        de = de + 1j * b * (A[j - 1] * up - B[j - 1] * dn)
        return e, de

    def source(self, side, j, z):
        """Right-hand side of the mode ODE."""
        if self.order == 0 or j == 3:
            return 0j
        cfg = self.cfg
        pj = cfg.p[j - 1]
        a2 = self.a1**2 + self.a2**2
        if side == "above":
            k, zp, r = cfg.kappa_plus, cfg.z_plus, self.fp.r
            em, ep = np.exp(-1j * k * z), np.exp(1j * k * z)
            return (2 * k**2 * pj / zp * (em + r * ep)
                    + 1j * k * pj * (zp - z) / zp * a2 * (em - r * ep)) * self.psi
        k, zm, t = cfg.kappa_minus, cfg.z_minus, self.fp.t
        em = np.exp(-1j * k * z)
        return (2 * k**2 * pj / zm * t * em + 1j * k * pj * (zm - z) / zm * a2 * t * em) * self.psi

    def boundary_source(self, side, j):
        """Inhomogeneous term of the transparent condition on the measurement plane."""
        cfg = self.cfg
        pj = cfg.p[j - 1]
        if self.order == 0:
            if side == "above" and tuple(self.n) == (0, 0):
                return -2j * cfg.kappa_plus * pj * np.exp(-1j * cfg.kappa_plus * cfg.z_plus)
            return 0j
        if side == "above":
            k, zp, r = cfg.kappa_plus, cfg.z_plus, self.fp.r
            return -1j * k * pj / zp * (np.exp(-1j * k * zp) - r * np.exp(1j * k * zp)) * self.psi
        k, zm, t = cfg.kappa_minus, cfg.z_minus, self.fp.t
        return -1j * k * pj / zm * t * np.exp(-1j * k * zm) * self.psi

    # ---- conditions, each returned as a list of term lists (sum = 0)

    def boundary_terms(self, side):
        z = self.cfg.plane(side)
        E = [self.value(side, j, z) for j in (1, 2, 3)]
        (e1, d1), (e2, d2), (e3, d3) = E
        v1, v2 = capacity_apply(e1, e2, side, self.n, self.cfg)
        # the order-0 source enters with +, the order-1 one with -
        sgn_f = 1.0 if self.order == 0 else -1.0
        sgn_t = 1.0 if side == "above" else -1.0
        f1, f2 = self.boundary_source(side, 1), self.boundary_source(side, 2)
        return [
            [d1, -1j * self.a1 * e3, -sgn_t * 1j * v1, -sgn_f * f1],
            [d2, -1j * self.a2 * e3, -sgn_t * 1j * v2, -sgn_f * f2],
            [d3, 1j * self.a1 * e1, 1j * self.a2 * e2],
        ]

    def jump_terms(self):
        """Value and derivative jumps of the tangential components at z = 0."""
        cfg = self.cfg
        up = [self.value("above", j, 0.0) for j in (1, 2, 3)]
        dn = [self.value("below", j, 0.0) for j in (1, 2, 3)]
        out = [
            [up[0][0], -dn[0][0]],
            [up[1][0], -dn[1][0]],
        ]
        if self.order == 0:
            out += [[up[0][1], -dn[0][1]], [up[1][1], -dn[1][1]]]
            return out
        src = 1j * cfg.kappa_minus * self.fp.t * (1 / cfg.z_plus - 1 / cfg.z_minus) * self.psi
        for j, a in ((1, self.a1), (2, self.a2)):
            out.append([up[j - 1][1], -1j * a * up[2][0], -dn[j - 1][1], 1j * a * dn[2][0],
                        -src * cfg.p[j - 1]])
        return out

    def divergence_terms(self):
        """Divergence conditions at z = 0 from either side."""
        cfg = self.cfg
        rhs = 0j
        if self.order == 1:
            rhs = cfg.kappa_minus * self.fp.t * (self.a1 * cfg.p[0] + self.a2 * cfg.p[1]) * self.psi
        out = []
        for side in ("above", "below"):
            e1, e2, e3 = (self.value(side, j, 0.0) for j in (1, 2, 3))
            out.append([e3[1], 1j * self.a1 * e1[0], 1j * self.a2 * e2[0], -rhs])
        return out


def _amps_from_solution(cfg, n, order, sol: FirstOrderSolution | None):
    """Amplitudes of the implemented solution in the shifted-exponential basis."""
    zero = np.zeros(3, dtype=complex)
    if order == 0:
        return {"above": (zero, zero), "below": (zero, zero)}
    if sol is None:
        sol = solve_first_order(cfg)
    idx = sol.cfg.grid.index_of(n)
    if not sol.guarded[idx]:
        raise ParameterError(f"mode {n} is excluded by the small-divisor guard")
    A = np.array([sol.c1[idx], sol.c2[idx], sol.a3[idx]])
    B = np.array([sol.c1[idx], sol.c2[idx], sol.b3[idx]])
    return {"above": (A, zero), "below": (zero, B)}


def _mode_field(cfg, n, order, psi_n, sol):
    if order not in (0, 1):
        raise ParameterError(f"order must be 0 or 1, got {order}")
    amps = _amps_from_solution(cfg, n, order, sol)
    scale = 1.0 if order == 0 else psi_n
    amps = {s: (a * scale, b * scale) for s, (a, b) in amps.items()}
    return _ModeField(cfg, n, order, psi_n, amps)


# --------------------------------------------------------------------------
# public residual checks

def ode_residual(order, side, j, n, cfg: GratingConfig, psi_n=1.0, sol=None) -> float:
    """Finite-difference residual of the mode ODE over the layer of ``side``.

    ``E''`` comes from a 5-point central stencil with step ``1e-4 * lambda``.
    The residual at each sample is divided by the size of the terms
    ``|E''| + |beta^2 E| + |F|``; the maximum over 41 samples is returned.
    """
    s = _side(side)
    mf = _mode_field(cfg, n, order, psi_n, sol)
    beta = mf.bp if s == "above" else mf.bm
    lo, hi = (0.0, cfg.z_plus) if s == "above" else (cfg.z_minus, 0.0)
    h = FD_STEP * cfg.wavelength
    worst = 0.0
    for z in np.linspace(lo, hi, N_ZSAMPLES):
        e = [mf.value(s, j, z + k * h)[0] for k in (-2, -1, 0, 1, 2)]
        d2 = (-e[0] + 16 * e[1] - 30 * e[2] + 16 * e[3] - e[4]) / (12 * h * h)
        f = mf.source(s, j, z)
        scale = abs(d2) + abs(beta**2 * e[2]) + abs(f)
        if scale == 0:
            continue
        worst = max(worst, abs(d2 + beta**2 * e[2] - f) / scale)
    return worst


def boundary_residual(order, n, cfg: GratingConfig, psi_n=1.0, sol=None) -> float:
    """Worst relative residual of the six transparent boundary equations at ``z+`` and ``z-``."""
    mf = _mode_field(cfg, n, order, psi_n, sol)
    terms = mf.boundary_terms("above") + mf.boundary_terms("below")
    return max(_rel(t) for t in terms)


def jump_residual(order, n, cfg: GratingConfig, psi_n=1.0, sol=None) -> float:
    """Worst relative residual of the value jump, derivative jump and divergence conditions at z = 0."""
    mf = _mode_field(cfg, n, order, psi_n, sol)
    terms = mf.jump_terms() + mf.divergence_terms()
    return max(_rel(t) for t in terms)


def divergence_residual(order, side, n, cfg: GratingConfig, psi_n=1.0, sol=None, z=None) -> float:
    """Divergence-free check ``E3' + i alpha . E_t`` at an interior height of ``side``.

    At order 1 the transformed field is not divergence free inside the
    layer, so only the order-0 field, or the order-1 field at ``z = 0``, is
    expected to give zero. Used mostly for diagnostics.
    """
    s = _side(side)
    mf = _mode_field(cfg, n, order, psi_n, sol)
    if z is None:
        z = 0.5 * cfg.plane(s)
    e1, e2, e3 = (mf.value(s, j, z) for j in (1, 2, 3))
    return _rel([e3[1], 1j * mf.a1 * e1[0], 1j * mf.a2 * e2[0]])


# --------------------------------------------------------------------------
# generic per-mode linear systems

def _affine_system(n, cfg, psi_n, unknowns, conditions):
    """Assemble ``M x = rhs`` from affine residual functionals.

    ``unknowns`` is a list of ``(side, 'A'|'B', j)`` slots; ``conditions``
    maps a :class:`_ModeField` to a flat list of residual values.
    """
    def residual(x):
        amps = {s: (np.zeros(3, complex), np.zeros(3, complex)) for s in ("above", "below")}
        for val, (side, which, j) in zip(x, unknowns):
            amps[side][0 if which == "A" else 1][j - 1] = val
        return np.array(conditions(_ModeField(cfg, n, 1, psi_n, amps)), dtype=complex)

    m = len(unknowns)
    f0 = residual(np.zeros(m))
    cols = [residual(np.eye(m)[k]) - f0 for k in range(m)]
    return np.column_stack(cols), -f0


def _interface_conditions(mf):
    return [sum(t) for t in mf.jump_terms() + mf.divergence_terms()]


def _all_conditions(mf):
    rows = mf.boundary_terms("above") + mf.boundary_terms("below")
    return [sum(t) for t in rows] + _interface_conditions(mf)


_SIX = [("above", "A", j) for j in (1, 2, 3)] + [("below", "B", j) for j in (1, 2, 3)]
_TWELVE = [(s, w, j) for s in ("above", "below") for w in ("A", "B") for j in (1, 2, 3)]


def assemble_interface_system(n, cfg: GratingConfig, psi_n=1.0):
    """6x6 system in ``(A+_1..3, B-_1..3)`` from the two value jumps, two derivative jumps and two divergence conditions."""
    return _affine_system(n, cfg, psi_n, _SIX, _interface_conditions)


def assemble_full_system(n, cfg: GratingConfig, psi_n=1.0):
    """12x12 system in all up/down amplitudes of both layers, boundary conditions included.

    The solution should have vanishing incoming amplitudes above and below.
    """
    return _affine_system(n, cfg, psi_n, _TWELVE, _all_conditions)


def solve_mode_system(n, cfg: GratingConfig, full=False):
    """Dense solve for unit ``psi_n``; returns ``{'c1', 'c2', 'a3', 'b3'}`` (+ ``'incoming'`` when ``full``)."""
    if full:
        M, rhs = assemble_full_system(n, cfg)
        x = np.linalg.solve(M, rhs)
        slot = dict(zip(_TWELVE, x))
        out = {
            "c1": slot[("above", "A", 1)], "c2": slot[("above", "A", 2)],
            "a3": slot[("above", "A", 3)], "b3": slot[("below", "B", 3)],
            "c1_below": slot[("below", "B", 1)], "c2_below": slot[("below", "B", 2)],
            "incoming": np.array([slot[("above", "B", j)] for j in (1, 2, 3)]
                                 + [slot[("below", "A", j)] for j in (1, 2, 3)]),
        }
        return out
    M, rhs = assemble_interface_system(n, cfg)
    x = np.linalg.solve(M, rhs)
    return {"c1": x[0], "c2": x[1], "a3": x[2], "b3": x[5], "c1_below": x[3], "c2_below": x[4]}


# --------------------------------------------------------------------------
# aggregate report

def full_report(cfg: GratingConfig, psi: SurfaceProfile, cap: int = 8, sol=None) -> ResidualReport:
    """Run every residual check on all guarded modes with ``max(|n1|, |n2|) <= cap``.

    Order-0 checks run on the DC mode; order-1 checks use the profile's
    own coefficients ``psi_n``.
    """
    if psi.grid != cfg.grid:
        raise ParameterError("profile and configuration use different grids")
    if sol is None:
        sol = solve_first_order(cfg)
    spec = psi.spectrum()
    rep = ResidualReport()
    dc = (0, 0)
    for s in ("above", "below"):
        for j in (1, 2, 3):
            rep.add(CheckResult(f"ode/order0/{s}/E{j}", ode_residual(0, s, j, dc, cfg), ODE_TOL, dc))
    rep.add(CheckResult("boundary/order0", boundary_residual(0, dc, cfg), ALGEBRAIC_TOL, dc))
    rep.add(CheckResult("jump+divergence/order0", jump_residual(0, dc, cfg), ALGEBRAIC_TOL, dc))

    basis = sol.basis
    sel = (np.maximum(np.abs(basis.n1), np.abs(basis.n2)) <= cap) & sol.guarded
    for n in basis.modes(sel):
        psi_n = spec[n]
        for s in ("above", "below"):
            for j in (1, 2, 3):
                rep.add(CheckResult(f"ode/order1/{s}/E{j}",
                                    ode_residual(1, s, j, n, cfg, psi_n, sol), ODE_TOL, n))
        rep.add(CheckResult("boundary/order1", boundary_residual(1, n, cfg, psi_n, sol), ALGEBRAIC_TOL, n))
        rep.add(CheckResult("jump+divergence/order1", jump_residual(1, n, cfg, psi_n, sol), ALGEBRAIC_TOL, n))
    return rep
