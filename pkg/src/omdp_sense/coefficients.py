"""Homodyne output coefficients M_out = A a_in + B a_in^dag + C F_1 + D F_2.

Two independent routes compute the same decomposition. ``solve_coefficients``
assembles the frequency-domain response system and eliminates it directly;
it handles arbitrary homodyne phase and independent complex couplings, and
it is the canonical path everywhere downstream. ``closed_form_coefficients``
is the compact algebraic expression, valid for theta = 0 and equal couplings,
kept as a fast cross-check of the solver.
"""

import cmath
from dataclasses import dataclass

from .errors import ParameterError, SingularSystemError
from .model import chi_cavity, chi_cavity_conj, chi_mech


@dataclass(frozen=True)
class OutputCoefficients:
    a_coef: complex
    b_coef: complex
    c_coef: complex
    d_coef: complex
    e_coef: complex
    d_e: complex


def _solve4(m, rhs):
    # Gaussian elimination with partial pivoting on a 4x4 complex system,
    # four right-hand sides at once. gamma > 0 keeps the system regular,
    # so a vanishing pivot is a hard error, not a rank decision.
    a = [list(m[i]) + list(rhs[i]) for i in range(4)]
    pivots = []
    for col in range(4):
        p = max(range(col, 4), key=lambda r: abs(a[r][col]))
        if abs(a[p][col]) == 0.0:
            cond = (max(pivots) / min(pivots)) if pivots else float("inf")
            raise SingularSystemError(
                "response system is singular at this frequency",
                condition=cond)
        if p != col:
            a[col], a[p] = a[p], a[col]
        pivots.append(abs(a[col][col]))
        inv = 1.0 / a[col][col]
        for r in range(col + 1, 4):
            fac = a[r][col] * inv
            if fac != 0.0:
                row_r, row_c = a[r], a[col]
                for c in range(col, 8):
                    row_r[c] -= fac * row_c[c]
    # back substitution, one pass for all four columns
    out = [[0j] * 4 for _ in range(4)]
    for j in range(4):
        for i in range(3, -1, -1):
            s = a[i][4 + j]
            for c in range(i + 1, 4):
                s -= a[i][c] * out[c][j]
            out[i][j] = s / a[i][i]
    return out


def solve_coefficients(params, omega):
    """Transfer coefficients from the eliminated response system.

    Unknowns are (da, da^dag at -omega, q1, q2) driven by unit inputs
    (a_in, a_in^dag, F_1, F_2); the output quadrature is
    i[a_out^dag e^{-i theta} - a_out e^{i theta}] with
    a_out = sqrt(kappa) da - a_in.
    """
    w = omega
    xc = chi_cavity(w, params.delta_prime, params.kappa)
    xcd = chi_cavity_conj(w, params.delta_prime, params.kappa)
    x1 = chi_mech(w, params.omega_m1, params.gamma1)
    x2 = chi_mech(w, params.omega_m2, params.gamma2)
    g1 = complex(params.g_lin)
    g2 = g1  # single drive, shared coupling
    v = params.v_coupling
    m = (
        (1.0 / xc, 0j, -1j * g1, -1j * g2),
        (0j, 1.0 / xcd, 1j * g1.conjugate(), 1j * g2.conjugate()),
        (-g1.conjugate(), -g1, 1.0 / x1, complex(v)),
        (-g2.conjugate(), -g2, complex(v), 1.0 / x2),
    )
    sk = params.kappa ** 0.5
    rhs = (
        (sk, 0j, 0j, 0j),
        (0j, sk, 0j, 0j),
        (0j, 0j, 1.0 + 0j, 0j),
        (0j, 0j, 0j, 1.0 + 0j),
    )
    x = _solve4(m, rhs)
    xa, xad = x[0], x[1]
    ep = cmath.exp(1j * params.theta)
    em = ep.conjugate()
    a = 1j * (sk * xad[0] * em - (sk * xa[0] - 1.0) * ep)
    b = 1j * ((sk * xad[1] - 1.0) * em - sk * xa[1] * ep)
    c = 1j * (sk * xad[2] * em - sk * xa[2] * ep)
    d = 1j * (sk * xad[3] * em - sk * xa[3] * ep)
    de = 1j * (v ** 2 * x1 * x2 - 1.0) + abs(g1) ** 2 * (xc - xcd) * (
        2.0 * v * x1 * x2 - x1 - x2)
    return OutputCoefficients(a, b, c, d, c + d, de)


def closed_form_coefficients(params, omega, b_form="conjugate"):
    """Algebraic coefficients for theta = 0 and equal couplings.

    ``b_form`` picks the coupling-squared factor in B: "conjugate" uses
    conj(G)^2, "direct" uses G^2. The two agree for real G; the solver
    settles which one the physics produces when G is complex.
    """
    if params.theta != 0.0:
        raise ParameterError("closed form is stated for theta = 0")
    w = omega
    xc = chi_cavity(w, params.delta_prime, params.kappa)
    xcd = chi_cavity_conj(w, params.delta_prime, params.kappa)
    x1 = chi_mech(w, params.omega_m1, params.gamma1)
    x2 = chi_mech(w, params.omega_m2, params.gamma2)
    g = complex(params.g_lin)
    v = params.v_coupling
    k = params.kappa
    gsq = g.conjugate() ** 2 if b_form == "conjugate" else g ** 2
    w2 = 2.0 * v * x1 * x2 - x1 - x2
    de = 1j * (v ** 2 * x1 * x2 - 1.0) + abs(g) ** 2 * (xc - xcd) * w2
    scale = abs(1j * (v ** 2 * x1 * x2 - 1.0)) + abs(g) ** 2 * abs(xc - xcd) * abs(w2)
    if abs(de) < 1e-30 * max(scale, 1e-300):
        raise SingularSystemError("denominator vanished", condition=float("inf"))
    a = 1j * (1.0 - k * xc) + 1j * k * xc * (
        abs(g) ** 2 * xc + g.conjugate() ** 2 * xcd) * w2 / de
    b = -1j * (1.0 - k * xcd) + 1j * k * xcd * (
        abs(g) ** 2 * xcd + gsq * xc) * w2 / de
    gcpl = 1j * (k ** 0.5) * (g * xc + g.conjugate() * xcd) / de
    c = gcpl * (v * x1 * x2 - x1)
    d = gcpl * (v * x1 * x2 - x2)
    return OutputCoefficients(a, b, c, d, c + d, de)


def amplification(params, omega):
    """Transduction gain |C + D| from the force inputs to the output."""
    return abs(solve_coefficients(params, omega).e_coef)
