"""Independent high-precision values frozen into tests/unit (mpmath, 50 digits).

Run: python3 tests/oracles/golden.py
"""
from mpmath import mp, mpf, pi, sqrt, exp, erf, quad, sin, cos, inf

mp.dps = 50

kB = mpf("1.380649e-23")
hbar = mpf("1.054571817e-34")
e = mpf("1.602176634e-19")
G = mpf("6.67430e-11")
amu = mpf("1.66053906660e-27")

# measured silica particle and reference trap
m = mpf("9.6e-17")
r = mpf("231e-9")
Q = 80 * e
r0, z0 = mpf("1.1e-3"), mpf("3.5e-3")
eta_ac, kappa_dc = mpf("0.82"), mpf("0.086")
U0, V0 = mpf(100), mpf(200)
wd = 2 * pi * 2000


def mathieu():
    qx = (Q / m) * 2 * eta_ac * V0 / (r0**2 * wd**2)
    ax = -(Q / m) * 4 * kappa_dc * U0 / (z0**2 * wd**2)
    az = -2 * ax
    fx = wd / 2 * sqrt(ax + qx**2 / 2) / (2 * pi)
    fz = wd / 2 * sqrt(az) / (2 * pi)  # q_z = 0
    return dict(q_x=qx, a_x=ax, a_z=az, f_x=fx, f_z=fz)


def epstein(P_mbar, T=293, mg=mpf("4.65e-26")):
    P = mpf(P_mbar) * 100
    vt = sqrt(8 * kB * T / (pi * mg))
    return 4 * pi * mg * r**2 * vt * P / (3 * kB * T * m) * (1 + pi / 8)


def chi(ma, T, L):
    return hbar**2 / (8 * ma * kB * T * L**2)


def B(y):
    return 1 - 2 / y + exp(-y) * (1 + 2 / y)


def g(x):
    return sqrt(pi) * x**3 * erf(x) + x**2 * (exp(-x**2) - 3) + 2 * (1 - exp(-x**2))


def eta_csl(lam, L):
    return 3 * lam * L**2 * m**2 * B(r**2 / L**2) / (r**4 * amu**2)


def eta_dcsl(lam, rc, T):
    x = chi(amu, T, rc)
    L = rc * (1 + x)
    return eta_csl(lam, L) * rc**2 / L**2 / (1 + x)


def gamma_dcsl(lam, rc, T):
    x = chi(amu, T, rc)
    return eta_dcsl(lam, rc, T) * 4 * rc**2 * x * (1 + x) * amu / m


def s_dcsl(w, lam, rc, T, gg):
    eta = eta_dcsl(lam, rc, T)
    gm = gamma_dcsl(lam, rc, T)
    k = gm / (2 * hbar * eta)
    gt = gg + gm
    return hbar**2 * eta * (1 + k**2 * m**2 * (gt**2 + w**2))


def gamma_ddp_single(R0, T):
    x = chi(m, T, R0)
    eta = G * m**2 / (6 * sqrt(pi) * hbar * (R0 * (1 + x)) ** 3)
    return eta * 4 * R0**2 * x * (1 + x)


def eta_dp(R0):
    x = r / R0
    return G * m**2 / (sqrt(pi) * hbar) * g(x) / (x**6 * R0**3)


def F(x):
    return 3 * (sin(x) - x * cos(x)) / x**3


def eta_csl_kspace(lam, rc):
    f = lambda k: k**4 * exp(-k**2 * rc**2) * F(k * r) ** 2
    return 4 * lam * m**2 * rc**3 / (3 * sqrt(pi) * amu**2) * quad(f, [0, 1 / rc, 10 / rc, inf])


def eta_dp_kspace(R0):
    f = lambda k: k**2 * exp(-k**2 * R0**2) * F(k * r) ** 2
    pts = sorted({mpf(0), 1 / R0, 1 / r, 10 / r, 60 / r})
    return 2 * G * m**2 / (3 * pi * hbar) * quad(f, pts + [inf])


def show(name, v):
    print(f"{name:40s} {mp.nstr(v, 17)}")


if __name__ == "__main__":
    for k, v in mathieu().items():
        show(k, v)
    show("gamma_gas_1e-4mbar_hz", epstein("1e-4") / (2 * pi))
    show("chi(amu,1e-7,1.5e-6)", chi(amu, mpf("1e-7"), mpf("1.5e-6")))
    for y in ["1e-3", "0.3", "0.49", "0.51", "2", "50"]:
        show(f"B({y})", B(mpf(y)))
    for x in ["1e-2", "0.3", "0.49", "0.51", "1", "5"]:
        show(f"g({x})", g(mpf(x)))
    show("gamma_dcsl(1e-14,1.5e-6,1e-7)", gamma_dcsl(mpf("1e-14"), mpf("1.5e-6"), mpf("1e-7")))
    show("eta_dcsl(1e-14,1.5e-6,1e-7)", eta_dcsl(mpf("1e-14"), mpf("1.5e-6"), mpf("1e-7")))
    show("s_dcsl(2pi150,...,gas 2pi81e-6)",
         s_dcsl(2 * pi * 150, mpf("1e-14"), mpf("1.5e-6"), mpf("1e-7"), 2 * pi * mpf("81e-6")))
    show("gamma_ddp_single(1e-15,2.7)", gamma_ddp_single(mpf("1e-15"), mpf("2.7")))
    show("eta_csl(1e-8,1e-7)", eta_csl(mpf("1e-8"), mpf("1e-7")))
    show("eta_csl_kspace(1e-8,1e-7)", eta_csl_kspace(mpf("1e-8"), mpf("1e-7")))
    show("eta_dp(1e-7)", eta_dp(mpf("1e-7")))
    show("eta_dp_kspace(1e-7)", eta_dp_kspace(mpf("1e-7")))
