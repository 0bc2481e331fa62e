# Copyright 2026 The DRF Planner Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Reference values hard-coded in the unit tests.

Evaluated with 50-digit arithmetic straight from the model formulas, with
no code shared with the C++ library. Run with `python3 derive_values.py`.
"""

from mpmath import mp, mpf, cos, sin, tan, exp, sqrt, pi

mp.dps = 50


def show(name, *values):
    print(name + ": " + ", ".join(mp.nstr(v, 17) for v in values))


# Bicycle Euler step from (x, y, v, theta, phi, phi_dot) = (0, 0, 10, pi/4, 0.1, 0)
# with (a, phi_ddot) = (1, 0.2), L = 2.7, dt = 0.1.
v, th, phi, phid, L, dt, a, phidd = mpf(10), pi / 4, mpf("0.1"), mpf(0), mpf("2.7"), mpf("0.1"), mpf(1), mpf("0.2")
show("step", dt * v * cos(th), dt * v * sin(th), v + dt * a,
     th + dt * v * tan(phi) / L, phi + dt * phid, phid + dt * phidd)

show("curvature(0.6, 2.7)", tan(mpf("0.6")) / mpf("2.7"))

# Obstacle frame, theta = 0.3, offset (2, 1).
t = mpf("0.3")
show("frame", cos(t) * 2 + sin(t) * 1, -sin(t) * 2 + cos(t) * 1)

# Default risk parameters.
A_s, sx, sy, beta, A_d, k_v, alpha, d_e, svmin = (
    mpf(1), mpf(4), mpf("1.2"), mpf(1), mpf("0.8"), mpf("0.5"), mpf(1), mpf(20), mpf("0.5"))

show("static at (sigma_x, 0)", A_s * exp(-1))
show("dynamic at center, v_rel > 0", A_d / (1 + exp(alpha * sx)))
show("decay at d_e", exp(-1))


def sgn(x):
    return (x > 0) - (x < 0)


def lobes(px, py, ox, oy, oth, ov, vh):
    rx, ry = px - ox, py - oy
    dx = cos(oth) * rx + sin(oth) * ry
    dy = -sin(oth) * rx + cos(oth) * ry
    st = A_s * exp(-(((dx / sx) ** 2 + (dy / sy) ** 2) ** beta))
    vrel = ov - vh
    s = sgn(vrel)
    sv = max(k_v * abs(vrel), svmin)
    dyn = A_d * exp(-dx ** 2 / sv ** 2 - dy ** 2 / sy ** 2) / (1 + exp(-s * (dx - alpha * sx * s)))
    return st, dyn


# Two obstacles, host at (0, 0) with speed 10, query (5, 2).
p = (mpf(5), mpf(2))
o1 = (mpf(3), mpf(1), mpf("0.4"), mpf(12))
o2 = (mpf(9), mpf(-1), mpf(-0.2), mpf(7))
F = exp(-sqrt(p[0] ** 2 + p[1] ** 2) / d_e)
s1, d1 = lobes(*p, *o1, mpf(10))
s2, d2 = lobes(*p, *o2, mpf(10))
show("total_risk obstacle 1", (s1 + d1) * F)
show("total_risk obstacle 2", (s2 + d2) * F)
show("total_risk both", (s1 + d1 + s2 + d2) * F)

# Arc motion: radius 20 about the origin, rate 0.4 rad/s, from angle 0.
show("arc after 0.1 s", 20 * cos(mpf("0.04")), 20 * sin(mpf("0.04")), pi / 2 + mpf("0.04"))

# Closest approach of host (0,0) moving (10,0) and an obstacle at (10,-10)
# moving (0,5).
dpx, dpy, dvx, dvy = mpf(10), mpf(-10), mpf(-10), mpf(5)
ts = -(dpx * dvx + dpy * dvy) / (dvx ** 2 + dvy ** 2)
show("closest approach t, d", ts, sqrt((dpx + dvx * ts) ** 2 + (dpy + dvy * ts) ** 2))

# Obstacle-free corridor: each step integrates alpha * gamma_0 * exp(-lambda t)
# exactly, so after k steps of dt, x_upper has moved by
# alpha * gamma_0 * (1 - exp(-lambda k dt)) / lambda.
g0, lam, dtc = mpf(8), mpf("0.8"), mpf("0.1")
alpha_v = min(1 + mpf("0.5") * 10 / 10, mpf(2))
show("corridor growth after 10 steps", alpha_v * g0 * (1 - exp(-lam * 10 * dtc)) / lam)
