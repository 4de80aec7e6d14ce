"""Reference values for the unit tests, evaluated in 30-digit arithmetic.

Run: python3 tools/reference_values.py
The output is pasted into tests/reference_values.hpp.
"""
import mpmath as mp

mp.mp.dps = 30
U, K, H = mp.mpf(140), mp.mpf("0.242"), mp.mpf(180)


def eta(x):
    return K * x / U


def f(y, z, e):
    return mp.e ** (-y**2 / (4 * e)) * (mp.e ** (-(z - H) ** 2 / (4 * e)) + mp.e ** (-(z + H) ** 2 / (4 * e)))


def impulse(x, y, z, t):
    e = eta(x)
    return mp.e ** (-(x - U * t) ** 2 / (4 * e)) * f(y, z, e) / (8 * (mp.pi * e) ** 1.5)


def breath_numeric(x, y, z, t):
    # Direct time integral of the impulse response, independent of the erfc form.
    c = x / U
    return mp.quad(lambda s: impulse(x, y, z, s), [0, c - mp.mpf("0.05"), c, c + mp.mpf("0.05"), t])


def steady_numeric(x, y, z):
    c = x / U
    return mp.quad(lambda s: impulse(x, y, z, s), [-mp.inf, c - mp.mpf("0.05"), c, c + mp.mpf("0.05"), mp.inf])


def freq_numeric(x, y, z, w):
    c = x / U
    g = lambda s: impulse(x, y, z, s) * mp.e ** (-1j * w * s)
    return mp.quad(g, [c - 1, c - mp.mpf("0.05"), c, c + mp.mpf("0.05"), c + 1])


def q(x):
    return mp.erfc(x / mp.sqrt(2)) / 2


def c_mean_numeric(cx, r, ts):
    # Steady in-line plume over the sphere. The ground image is below 1e-80000
    # here, and the remaining Gaussian integrates in closed form over each
    # crosswind disk of radius sqrt(r^2 - s^2), leaving a 1D integral in s.
    disk = lambda s: (1 - mp.e ** (-(r**2 - s**2) / (4 * eta(cx + s)))) / U
    return ts * mp.quad(disk, [-r, 0, r])


rows = {
    "eta_100": eta(100),
    "eta_power_200": (K * 100 / mp.mpf(1.5)) * mp.mpf(2) ** mp.mpf(1.5) / U,
    "eta_linear_300": (K * 300 + K * mp.mpf("0.005") * 300**2) / U,
    "impulse_a": impulse(mp.mpf(100), mp.mpf(1), mp.mpf(181), mp.mpf(100) / U + mp.mpf("0.002")),
    "impulse_b": impulse(mp.mpf(250), mp.mpf(-2), mp.mpf(179), mp.mpf(250) / U - mp.mpf("0.004")),
    "breath_a": breath_numeric(mp.mpf(100), mp.mpf("0.5"), mp.mpf("180.5"), mp.mpf("0.72")),
    "steady_a": steady_numeric(mp.mpf(100), mp.mpf(0), mp.mpf(180)),
    "steady_b": steady_numeric(mp.mpf(250), mp.mpf(2), mp.mpf(178)),
    "q_1": q(1),
    "q_2p5": q(mp.mpf("2.5")),
}
h = freq_numeric(mp.mpf(100), mp.mpf(0), mp.mpf(180), mp.mpf(100))
rows["freq_100_re"] = h.real
rows["freq_100_im"] = h.imag
rows["c_mean_100"] = c_mean_numeric(mp.mpf(100), mp.mpf(2), mp.mpf(3))

for k, v in rows.items():
    print(f"inline constexpr double {k} = {mp.nstr(v, 17)};")
