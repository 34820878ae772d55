"""Physical constants shared across the toolkit. SI units unless noted."""

R_EARTH_KM = 6378.137
MU_EARTH_KM3_S2 = 398600.4418
STEFAN_BOLTZMANN = 5.670374e-8  # W/(m^2 K^4)
STANDARD_GRAVITY = 9.80665      # m/s^2
SOLAR_FLUX_NOMINAL = 1353.0     # W/m^2, nominal irradiance used for power arithmetic
ZERO_CELSIUS_K = 273.15
