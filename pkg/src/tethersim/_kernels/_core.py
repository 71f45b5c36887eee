"""Scalar kernel for the coupled vehicle-winch-cable plant.

This module is written in Cython "pure Python" mode: it runs unchanged under
the plain interpreter and compiles to a C extension when built.  Everything
here works on flat tuples of Python floats; locals carry cython.double
annotations so the compiled version does the arithmetic on C doubles (local
annotations are never evaluated by the interpreter, so the fallback needs no
Cython at runtime).

State layout (24 floats):
    0:3   vehicle position x_q (world frame, z up)
    3:6   vehicle velocity v_q
    6:15  body-to-world rotation matrix R, row-major
    15:18 body angular velocity Omega
    18    cable azimuth alpha
    19    cable polar angle beta (0 = hanging straight down)
    20    alpha rate
    21    beta rate
    22    cable length L
    23    cable length rate

Input layout (8 floats):
    0     collective thrust magnitude T (along body z)
    1:4   body torque tau
    4     commanded winch acceleration Lddot
    5:8   external force on the hook F_c (world frame)

Parameter layout (25 floats):
    0     vehicle mass M_q
    1     hook mass M_h
    2:11  inertia matrix J, row-major
    11:20 inverse inertia, row-major
    20:23 gravity vector g
    23    minimum cable length
    24    maximum cable length
"""

from math import cos, sin, sqrt

try:
    import cython
except ImportError:  # pragma: no cover - plain interpreter without Cython

    class _Shim:
        compiled = False

    cython = _Shim()

COMPILED = cython.compiled

STATE_SIZE = 24
INPUT_SIZE = 8
PARAM_SIZE = 25

# Below this sine of the polar angle the azimuth coordinate is degenerate and
# its acceleration is dropped unless the out-of-plane demand is significant.
SIN_BETA_MIN = 1e-6
AZIMUTH_DEMAND_MAX = 10.0  # rad/s^2


class SingularConfigurationError(RuntimeError):
    """Cable is vertical while the dynamics demand an azimuth acceleration."""


def deriv(s, u, p):
    """Time derivative of the 24-float plant state.

    Returns a 24-tuple. Raises SingularConfigurationError when the cable is
    within SIN_BETA_MIN of vertical and the out-of-plane angular-acceleration
    demand exceeds AZIMUTH_DEMAND_MAX.
    """
    vx: cython.double = s[3]
    vy: cython.double = s[4]
    vz: cython.double = s[5]
    r00: cython.double = s[6]
    r01: cython.double = s[7]
    r02: cython.double = s[8]
    r10: cython.double = s[9]
    r11: cython.double = s[10]
    r12: cython.double = s[11]
    r20: cython.double = s[12]
    r21: cython.double = s[13]
    r22: cython.double = s[14]
    wx: cython.double = s[15]
    wy: cython.double = s[16]
    wz: cython.double = s[17]
    alpha: cython.double = s[18]
    beta: cython.double = s[19]
    ad: cython.double = s[20]
    bd: cython.double = s[21]
    L: cython.double = s[22]
    Ldot: cython.double = s[23]

    T: cython.double = u[0]
    taux: cython.double = u[1]
    tauy: cython.double = u[2]
    tauz: cython.double = u[3]
    lddot: cython.double = u[4]
    fcx: cython.double = u[5]
    fcy: cython.double = u[6]
    fcz: cython.double = u[7]

    mq: cython.double = p[0]
    mh: cython.double = p[1]

    sa: cython.double = sin(alpha)
    ca: cython.double = cos(alpha)
    sb: cython.double = sin(beta)
    cb: cython.double = cos(beta)

    # Cable direction, polar tangent, and the in-plane swing axis.
    ex: cython.double = sb * ca
    ey: cython.double = sb * sa
    ez: cython.double = -cb
    tx: cython.double = cb * ca
    ty: cython.double = cb * sa
    tz: cython.double = sb
    bx: cython.double = sa
    by: cython.double = -ca

    # Cable angular velocity omega_l = alpha_dot*sin(beta)*t + beta_dot*b.
    adsb: cython.double = ad * sb
    wlx: cython.double = adsb * tx + bd * bx
    wly: cython.double = adsb * ty + bd * by
    wlz: cython.double = adsb * tz

    # Thrust vector in world frame: T * R e_z.
    ftx: cython.double = T * r02
    fty: cython.double = T * r12
    ftz: cython.double = T * r22

    # e_l x F_t and e_l x F_c.
    exft_x: cython.double = ey * ftz - ez * fty
    exft_y: cython.double = ez * ftx - ex * ftz
    exft_z: cython.double = ex * fty - ey * ftx
    exfc_x: cython.double = ey * fcz - ez * fcy
    exfc_y: cython.double = ez * fcx - ex * fcz
    exfc_z: cython.double = ex * fcy - ey * fcx

    # Cable angular acceleration from the rotational cable equation:
    # M_q L^2 wl_dot = -2 M_q L Ldot wl - L e x F_t + (M_q/M_h) L e x F_c
    c_rate: cython.double = -2.0 * Ldot / L
    c_ft: cython.double = -1.0 / (mq * L)
    c_fc: cython.double = 1.0 / (mh * L)
    wldx: cython.double = c_rate * wlx + c_ft * exft_x + c_fc * exfc_x
    wldy: cython.double = c_rate * wly + c_ft * exft_y + c_fc * exfc_y
    wldz: cython.double = c_rate * wlz + c_ft * exft_z + c_fc * exfc_z

    # Remove the frame-rate part Edot @ eta_dot = 2 ad bd cb t - ad^2 sb cb b.
    g1: cython.double = 2.0 * ad * bd * cb
    g2: cython.double = ad * ad * sb * cb
    rx: cython.double = wldx - g1 * tx + g2 * bx
    ry: cython.double = wldy - g1 * ty + g2 * by
    rz: cython.double = wldz - g1 * tz

    beta_dd: cython.double = bx * rx + by * ry
    azi: cython.double = tx * rx + ty * ry + tz * rz
    alpha_dd: cython.double
    if sb < SIN_BETA_MIN:
        if azi > AZIMUTH_DEMAND_MAX or azi < -AZIMUTH_DEMAND_MAX:
            raise SingularConfigurationError(
                "cable within %.0e of vertical with azimuth acceleration "
                "demand %.3f rad/s^2" % (SIN_BETA_MIN, azi)
            )
        alpha_dd = 0.0
    else:
        alpha_dd = azi / sb

    # Vehicle translational dynamics with the cable coupling terms:
    # (M_q+M_h) a = (M_q+M_h) g + (I - (M_h/M_q) hat(e)^2) F_t
    #               - M_h Lddot e + e (e . F_c) - M_h L |wl|^2 e
    mt: cython.double = mq + mh
    rm: cython.double = mh / mq
    edotft: cython.double = ex * ftx + ey * fty + ez * ftz
    edotfc: cython.double = ex * fcx + ey * fcy + ez * fcz
    w2: cython.double = adsb * adsb + bd * bd
    coef_e: cython.double = rm * edotft + mh * lddot + mh * L * w2 - edotfc
    c1: cython.double = (1.0 + rm) / mt
    gx: cython.double = p[20]
    gy: cython.double = p[21]
    gz: cython.double = p[22]
    ax: cython.double = gx + c1 * ftx - coef_e * ex / mt
    ay: cython.double = gy + c1 * fty - coef_e * ey / mt
    az: cython.double = gz + c1 * ftz - coef_e * ez / mt

    # Attitude dynamics: J Omega_dot = -Omega x J Omega + tau.
    j00: cython.double = p[2]
    j01: cython.double = p[3]
    j02: cython.double = p[4]
    j10: cython.double = p[5]
    j11: cython.double = p[6]
    j12: cython.double = p[7]
    j20: cython.double = p[8]
    j21: cython.double = p[9]
    j22: cython.double = p[10]
    jwx: cython.double = j00 * wx + j01 * wy + j02 * wz
    jwy: cython.double = j10 * wx + j11 * wy + j12 * wz
    jwz: cython.double = j20 * wx + j21 * wy + j22 * wz
    mx: cython.double = taux - (wy * jwz - wz * jwy)
    my: cython.double = tauy - (wz * jwx - wx * jwz)
    mz: cython.double = tauz - (wx * jwy - wy * jwx)
    wdx: cython.double = p[11] * mx + p[12] * my + p[13] * mz
    wdy: cython.double = p[14] * mx + p[15] * my + p[16] * mz
    wdz: cython.double = p[17] * mx + p[18] * my + p[19] * mz

    # R_dot = R hat(Omega).
    return (
        vx,
        vy,
        vz,
        ax,
        ay,
        az,
        r01 * wz - r02 * wy,
        -r00 * wz + r02 * wx,
        r00 * wy - r01 * wx,
        r11 * wz - r12 * wy,
        -r10 * wz + r12 * wx,
        r10 * wy - r11 * wx,
        r21 * wz - r22 * wy,
        -r20 * wz + r22 * wx,
        r20 * wy - r21 * wx,
        wdx,
        wdy,
        wdz,
        ad,
        bd,
        alpha_dd,
        beta_dd,
        Ldot,
        lddot,
    )


def effective_winch_accel(s, u, p):
    """Winch acceleration actually realized once the hard stops are applied."""
    lddot: cython.double = u[4]
    L: cython.double = s[22]
    if L >= p[24] - 1e-12 and lddot > 0.0:
        return 0.0
    if L <= p[23] + 1e-12 and lddot < 0.0:
        return 0.0
    return lddot


def axial_hook_accel(s, u, p):
    """Acceleration of the hook projected on the cable direction.

    x_h = x_q + L e_l gives xh_dd . e_l = a_q . e_l + Lddot - L |omega_l|^2.
    Uses the realized winch acceleration.
    """
    d = deriv(
        s,
        (u[0], u[1], u[2], u[3], effective_winch_accel(s, u, p), u[5], u[6], u[7]),
        p,
    )
    alpha: cython.double = s[18]
    beta: cython.double = s[19]
    ad: cython.double = s[20]
    bd: cython.double = s[21]
    sb: cython.double = sin(beta)
    ex: cython.double = sb * cos(alpha)
    ey: cython.double = sb * sin(alpha)
    ez: cython.double = -cos(beta)
    w2: cython.double = ad * sb * ad * sb + bd * bd
    ax: cython.double = d[3]
    ay: cython.double = d[4]
    az: cython.double = d[5]
    lddot: cython.double = d[23]
    L: cython.double = s[22]
    return ax * ex + ay * ey + az * ez + lddot - L * w2


def cable_tension(s, u, p):
    """(clamped, raw) cable tension consistent with the hook force balance.

    raw = (F_c + M_h g - M_h xh_dd) . e_l; a negative value means the massless
    cable would have to push (slack) and is clamped to zero.
    """
    alpha: cython.double = s[18]
    beta: cython.double = s[19]
    sb: cython.double = sin(beta)
    ex: cython.double = sb * cos(alpha)
    ey: cython.double = sb * sin(alpha)
    ez: cython.double = -cos(beta)
    mh: cython.double = p[1]
    axial: cython.double = axial_hook_accel(s, u, p)
    fcx: cython.double = u[5]
    fcy: cython.double = u[6]
    fcz: cython.double = u[7]
    gx: cython.double = p[20]
    gy: cython.double = p[21]
    gz: cython.double = p[22]
    raw: cython.double = (
        fcx * ex
        + fcy * ey
        + fcz * ez
        + mh * (gx * ex + gy * ey + gz * ez)
        - mh * axial
    )
    if raw < 0.0:
        return 0.0, raw
    return raw, raw


def rk4_step(s, u, p, dt):
    """One classical 4th-order step with rotation renormalization and length
    hard stops.  The winch command is resolved against the stops once at the
    start of the step and held through the stages."""
    ue = (u[0], u[1], u[2], u[3], effective_winch_accel(s, u, p), u[5], u[6], u[7])
    h: cython.double = dt
    h2: cython.double = 0.5 * h
    h6: cython.double = h / 6.0
    k1 = deriv(s, ue, p)
    s2 = tuple([s[i] + h2 * k1[i] for i in range(24)])
    k2 = deriv(s2, ue, p)
    s3 = tuple([s[i] + h2 * k2[i] for i in range(24)])
    k3 = deriv(s3, ue, p)
    s4 = tuple([s[i] + h * k3[i] for i in range(24)])
    k4 = deriv(s4, ue, p)
    out = [
        s[i] + h6 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) for i in range(24)
    ]

    # Re-orthonormalize the rotation matrix (Gram-Schmidt on the columns).
    c0x: cython.double = out[6]
    c0y: cython.double = out[9]
    c0z: cython.double = out[12]
    n0: cython.double = sqrt(c0x * c0x + c0y * c0y + c0z * c0z)
    c0x /= n0
    c0y /= n0
    c0z /= n0
    c1x: cython.double = out[7]
    c1y: cython.double = out[10]
    c1z: cython.double = out[13]
    d01: cython.double = c0x * c1x + c0y * c1y + c0z * c1z
    c1x -= d01 * c0x
    c1y -= d01 * c0y
    c1z -= d01 * c0z
    n1: cython.double = sqrt(c1x * c1x + c1y * c1y + c1z * c1z)
    c1x /= n1
    c1y /= n1
    c1z /= n1
    c2x: cython.double = c0y * c1z - c0z * c1y
    c2y: cython.double = c0z * c1x - c0x * c1z
    c2z: cython.double = c0x * c1y - c0y * c1x
    out[6] = c0x
    out[7] = c1x
    out[8] = c2x
    out[9] = c0y
    out[10] = c1y
    out[11] = c2y
    out[12] = c0z
    out[13] = c1z
    out[14] = c2z

    # Cable length hard stops: pin the length and zero an outward rate.
    Lmax: cython.double = p[24]
    Lmin: cython.double = p[23]
    if out[22] > Lmax:
        out[22] = Lmax
        if out[23] > 0.0:
            out[23] = 0.0
    elif out[22] < Lmin:
        out[22] = Lmin
        if out[23] < 0.0:
            out[23] = 0.0
    return tuple(out)
