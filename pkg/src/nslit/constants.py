"""Physical constants, SI units."""

import math

# h and k_B are exact by the 2019 SI definitions.  hbar is derived as h/2pi at
# full double precision rather than stored as a 10-digit rounded literal, so
# that hbar*k_z/m and h/(m*lambda) agree to machine precision.
PLANCK = 6.62607015e-34            # J s
HBAR = PLANCK / (2.0 * math.pi)    # J s
BOLTZMANN = 1.380649e-23           # J / K

# CODATA 2018 neutron mass.
NEUTRON_MASS = 1.67492749804e-27   # kg
