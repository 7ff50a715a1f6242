"""
Spin-1 algebra and the beam-splitter rotation
==============================================

The phase object acts with F_x, while the polarizers are diagonal in F_z.
Switching between the two is a quarter-turn of the quantization axis.
"""

import math

import numpy as np

from twinatom import spinops

np.set_printoptions(precision=4, suppress=True)

# The three spin-1 matrices in the m_z = (+1, 0, -1) basis.
print("F_x =\n", spinops.f_x().real)

# Rotating the axis by a quarter turn turns F_z into F_x.
d = spinops.axis_rotation
print("D(-pi/2) F_z D(pi/2) =\n", (d(-math.pi / 2) @ spinops.f_z() @ d(math.pi / 2)).real)

# The same holds for the exponentials, which is how the phase object is built.
phi = 0.9
lhs = spinops.exp_i_fx(phi)
print("exp(i phi F_x) unitary:", np.allclose(lhs @ lhs.conj().T, np.eye(3)))

# The m_z = +1 state fans out over the three m_x components.
print("|+1> in the O_x basis:", np.abs(d(math.pi / 2) @ spinops.basis_ket(1)) ** 2)

# Coupling two spin-1 atoms to total F = 0 gives the singlet amplitudes.
for m1 in (1, 0, -1):
    print(f"<1 {m1:+d}; 1 {-m1:+d} | 0 0> = {spinops.clebsch_gordan_11(m1, -m1, 0, 0):+.6f}")

# Converting magnet settings into a Zeeman phase: a 10 eV hydrogen fragment
# crossing a 2 cm region of about 20 microtesla.
mass = 1.6735e-27
speed = 4.4e4
for field_integral in (2e-7, 3.9e-7, 8e-7):
    params = spinops.PhysicalBeamParams(
        p0=mass * speed, atom_mass=mass, g_factor=2.0, field_integral=field_integral
    )
    print(f"int B dx = {field_integral:.1e} T m  ->  phase {spinops.zeeman_phase(params):.3f} rad")
