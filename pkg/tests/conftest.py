import math

from boxqft.fields import dirac_space_channels, photon_space_channels
from boxqft.fock import ModeGrid, Species, build_fock_space

BOX = 2 * math.pi


def scalar_grid(n_mode=2, mass=0.0, box=BOX, v_c=1.0):
    return ModeGrid(axes=(3,), lengths=(box,), ranges=((-n_mode, n_mode),),
                    species=Species.BOSON, mass=mass, v_c=v_c)


def scalar_space(n_mode=2, mass=0.0, box=BOX, caps=(2, 2)):
    return build_fock_space([("phi", scalar_grid(n_mode, mass, box))],
                            caps[0], caps[1])


def dirac_space(n_mode=2, mass=1.0, box=BOX, caps=(1, 2)):
    grid = ModeGrid(axes=(3,), lengths=(box,), ranges=((-n_mode, n_mode),),
                    species=Species.FERMION, mass=mass)
    return build_fock_space(dirac_space_channels(grid), caps[0], caps[1])


def photon_space(n_mode=2, box=BOX, caps=(2, 2)):
    grid = ModeGrid(axes=(3,), lengths=(box,), ranges=((-n_mode, n_mode),),
                    species=Species.BOSON, mass=0.0)
    return build_fock_space(photon_space_channels(grid), caps[0], caps[1])
