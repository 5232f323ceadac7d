"""Beam cross-section properties.

Geometric moments and stiffnesses are stored independently so that the
stiffness entries can be overridden (chains have near-zero bending stiffness
that is kept small but finite to keep the system well conditioned).
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class CrossSection:
    """Circular cross-section of a mooring line / beam.

    area:            A (m^2)
    diameter:        d (m)
    I2, I3:          second moments of area (m^4)
    J:               polar moment of area (m^4)
    EA:              axial stiffness (N)
    GA2, GA3:        shear stiffnesses (N)
    EI2, EI3:        bending stiffnesses (N m^2)
    GJ:              torsional stiffness (N m^2)
    rho:             material density (kg/m^3)
    """

    area: float
    diameter: float
    I2: float
    I3: float
    J: float
    EA: float
    GA2: float
    GA3: float
    EI2: float
    EI3: float
    GJ: float
    rho: float

    def __post_init__(self):
        for name in ("area", "EA", "GA2", "GA3", "EI2", "EI3", "GJ", "rho"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"cross-section field {name!r} must be positive")

    @property
    def mass_per_length(self) -> float:
        return self.rho * self.area

    @property
    def force_stiffness(self):
        """Material stiffness diag(EA, GA2, GA3) for the strain measure."""
        import numpy as np

        return np.diag([self.EA, self.GA2, self.GA3])

    @property
    def moment_stiffness(self):
        """Material stiffness diag(GJ, EI2, EI3) for the curvature measure."""
        import numpy as np

        return np.diag([self.GJ, self.EI2, self.EI3])

    @property
    def rotary_inertia(self):
        """Per-unit-length rotary inertia diag(rho J, rho I2, rho I3)."""
        import numpy as np

        return np.diag([self.rho * self.J, self.rho * self.I2, self.rho * self.I3])


def circular_section(
    diameter: float,
    EA: float,
    mass_per_length: float,
    GA: float | None = None,
    EI: float | None = None,
    GJ: float | None = None,
) -> CrossSection:
    """Build a circular section from the quantities a mooring spec provides.

    Defaults when not overridden: GA = EA/2; EI from E pi d^4/64 with the
    effective modulus E = EA/A; GJ = EI.  These keep bending/torsion small
    (chain-like) but non-zero.
    """
    if diameter <= 0.0:
        raise ValueError("diameter must be positive")
    area = math.pi * diameter**2 / 4.0
    I2 = math.pi * diameter**4 / 64.0
    if EI is None:
        EI = (EA / area) * I2
    if GA is None:
        GA = EA / 2.0
    if GJ is None:
        GJ = EI
    return CrossSection(
        area=area,
        diameter=diameter,
        I2=I2,
        I3=I2,
        J=2.0 * I2,
        EA=EA,
        GA2=GA,
        GA3=GA,
        EI2=EI,
        EI3=EI,
        GJ=GJ,
        rho=mass_per_length / area,
    )
