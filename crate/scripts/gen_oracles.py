"""Reference values for crates/hecke-moments/tests/oracles.rs, computed with mpmath.

Run: python3 scripts/gen_oracles.py
"""
from mpmath import mp, lerchphi, mpf, mpc, zeta, gamma, loggamma, quad, exp, tanh, pi, inf, expjpi, sqrt, log, euler

mp.dps = 45


def show(name, v):
    if isinstance(v, mpc):
        print(f"{name} = ({mp.nstr(v.real, 35)}, {mp.nstr(v.imag, 35)})")
    else:
        print(f"{name} = {mp.nstr(v, 35)}")


for s in [mpc(0.5, 14), mpc(2.5, -3), mpc(-1.5, 2), mpc(0.3, 40)]:
    show(f"zeta{(float(s.real), float(s.imag))}", zeta(s))
for s, a in [(mpc(3, 1), mpf(1) / 3), (mpc(0.5, 10), mpf(3) / 4), (mpc(-2.5, 1), mpf(1) / 7)]:
    show(f"hurwitz{(float(s.real), float(s.imag), float(a))}", zeta(s, a))
for z in [mpc(0.5, 0.5), mpc(7.25, -3), mpc(-2.5, 1)]:
    show(f"gamma{(float(z.real), float(z.imag))}", gamma(z))
show("loggamma(10,100)", loggamma(mpc(10, 100)))

# E(s; e(h/k)) = sum_{m>=1} z^m m^-s = z Phi(z, s, 1) with z = e(h/k)
for s, h, k in [(mpc(0.5, 3), 1, 3), (mpc(-1.25, 0.5), 2, 5), (mpc(2, -4), 5, 7)]:
    z = expjpi(2 * mpf(h) / k)
    v = z * lerchphi(z, s, 1)
    show(f"lerch{(float(s.real), float(s.imag), h, k)}", v)

# int_0^30 |zeta(1/2+it)|^2 dt
mp.dps = 30
pts = [mpf(i) for i in range(0, 31)]
show("second_moment_30", quad(lambda t: abs(zeta(mpc(0.5, t))) ** 2, pts))
mp.dps = 45


def kuz(r, c, w):
    p = (r * r + mpf(1) / 4) * (r * r + mpf(9) / 4)
    return p / (p + 626) * (exp(-((r - c) / w) ** 2) + exp(-((r + c) / w) ** 2))


show("psi_hat_one_tanh(60,4)", 2 * quad(lambda u: u * kuz(u, 60, 4) * tanh(pi * u), [0, 40, 60, 80, 120]))

for j, A in [(3, mpc(0.7, -0.4)), (8, mpc(1.5, 0))]:
    show(f"gauss_moment{(j, float(A.real), float(A.imag))}", quad(lambda y: y ** j * exp(-y * y + A * y), [-inf, 0, inf]))


def d(n):
    return sum(1 for i in range(1, n + 1) if n % i == 0)


show("d2_partial(2,200)", sum(mpf(d(n)) ** 2 / mpf(n) ** 2 for n in range(1, 201)))
