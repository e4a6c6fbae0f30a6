"""Physical constants and unit conversions (strict SI internally)."""

from scipy.constants import hbar as HBAR  # J s
from scipy.constants import k as KB  # J/K
from scipy.constants import c as C_LIGHT  # m/s
from scipy.constants import epsilon_0 as EPS0  # F/m
from scipy.constants import e as _e

EV = _e  # 1 eV in J (exact, 1.602176634e-19)
DEBYE = 3.33564e-30  # 1 Debye in C m

# Pointwise group-velocity floor for van-Hove-capped DOS *plots*; integrated
# quantities always use q-space integrals and never see this cap.
VG_FLOOR_FRACTION = 1e-3
