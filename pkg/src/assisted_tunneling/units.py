"""Natural-unit conversions (hbar = c = 1, lengths and times in fm).

Energies, momenta and barrier strengths are carried in fm^-1; a coupling
to a linear potential ``mu * x`` therefore carries fm^-2.
"""

HBARC_MEV_FM = 197.327
"""hbar * c in MeV fm."""

SECONDS_PER_FM = 3.33564e-24
"""Light travel time across one fermi, in seconds."""

# 1 e V/m = 1e-6 MeV / 1e15 fm = 1e-21 MeV/fm
_EV_PER_M_TO_MEV_PER_FM = 1e-21


def mev_to_invfm(energy_mev):
    """Convert an energy (or mass) in MeV to fm^-1."""
    return energy_mev / HBARC_MEV_FM


def invfm_to_mev(value_invfm):
    return value_invfm * HBARC_MEV_FM


def hz_to_invfm(omega_hz):
    """Convert an angular frequency in s^-1 to fm^-1 of time."""
    return omega_hz * SECONDS_PER_FM


def invfm_to_hz(omega_invfm):
    return omega_invfm / SECONDS_PER_FM


def seconds_to_fm(t_seconds):
    return t_seconds / SECONDS_PER_FM


def fm_to_seconds(t_fm):
    return t_fm * SECONDS_PER_FM


def field_to_mu(field_v_per_m, charge_multiple=2):
    """Coupling ``mu`` (fm^-2) of a particle with charge ``charge_multiple * |e|``
    in a uniform electric field given in V/m.

    The default charge multiple of 2 is the alpha particle.
    """
    if charge_multiple < 1:
        raise ValueError("charge_multiple must be >= 1")
    return charge_multiple * field_v_per_m * _EV_PER_M_TO_MEV_PER_FM / HBARC_MEV_FM
