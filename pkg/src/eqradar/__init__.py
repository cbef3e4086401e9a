"""Single-electron Mach-Zehnder quantum radar simulator.

Core pipeline: a radiation coupler model yields the EMP scattering matrix
S(omega); the decoherence solver turns S_bb into the elastic amplitude
Z1(omega); the radiation module builds the Franck-Condon recoil factor of
the incoming state; the radar module assembles the dc interference signal
of a Leviton probe.  ``eqradar run`` drives it from JSON scenarios.
"""

__version__ = "0.1.0"

from .coupler import (  # noqa: F401
    CouplerParams,
    CounterPropagatingCoupler,
    DirectDriveCoupler,
    SMatrix,
    TabulatedCoupler,
    TopGateCoupler,
    load_tabulated_coupler,
    s_matrix,
)
from .decoherence import (  # noqa: F401
    ElasticAmplitude,
    ballistic_amplitude,
    inelastic_probability,
    solve_elastic_amplitude,
    wigner_smith_delay,
)
from .radar import (  # noqa: F401
    LevitonProbe,
    LevitonRadar,
    RadarResult,
    contrast_sweep,
    dc_current,
    filter_f,
    vacuum_baseline,
    xplus_dc,
)
from .radiation import (  # noqa: F401
    ClassicalDrive,
    FockLorentzian,
    FockMixture,
    SqueezedNarrowband,
    Vacuum,
    fc_classical,
    fc_fock,
    fc_mixture,
    fc_squeezed_exact,
    fc_squeezed_harmonics,
    fc_vacuum,
    franck_condon_factor,
    heat_current,
    squeezing_db_to_z,
)
