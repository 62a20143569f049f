"""Bundled example configuration ("appendixA"): two-species Rydberg pair at
20 um with the worked vdW coefficients, leakage detunings and tweezer trap.

The 540 us lifetime is an ASSUMED placeholder (no measured value ships with
this package); budgets built on it carry an ``assumed_lifetimes`` flag.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from . import errors
from .atoms import RotatedBasis, VdwSpec, blockade_from_c6, load_interaction_config

TWO_PI = 2.0 * np.pi

APPENDIX_A_VDW = VdwSpec(
    c6_01=35.71 * TWO_PI * 1e6,      # rad/us um^6  (35.71 x 2pi THz um^6)
    c6_02=-10.07 * TWO_PI * 1e6,
    l=20.0,
    c6_exchange=-5.0 * TWO_PI * 1e3,  # informational only; never used
)

APPENDIX_A_OMEGA = 30.0 * TWO_PI          # rad/us
APPENDIX_A_DELTA1 = errors.DELTA1_DEFAULT
APPENDIX_A_DELTA2 = errors.DELTA2_DEFAULT
APPENDIX_A_TAU_US = 540.0                 # assumed, not a measured number
APPENDIX_A_TRAP_W_UM = 3.0
APPENDIX_A_TRAP_LAMBDA_UM = 1.1
APPENDIX_A_TRAP_DEPTH_MK = 20.0

PRESET_NAMES = ("appendixA",)


def preset_vdw(name: str) -> VdwSpec:
    if name == "appendixA":
        return APPENDIX_A_VDW
    raise KeyError(f"unknown preset {name!r}; available: {PRESET_NAMES}")


def preset_blockade(name: str):
    return blockade_from_c6(preset_vdw(name))


def preset_trap(name: str, temperature_uk: float) -> errors.TrapSpec:
    if name != "appendixA":
        raise KeyError(f"unknown preset {name!r}; available: {PRESET_NAMES}")
    return errors.TrapSpec(w=APPENDIX_A_TRAP_W_UM, lam=APPENDIX_A_TRAP_LAMBDA_UM,
                           depth_mk=APPENDIX_A_TRAP_DEPTH_MK,
                           temperature_uk=temperature_uk)


def preset_config_text(name: str) -> str:
    """The bundled key=value config file for the preset."""
    if name != "appendixA":
        raise KeyError(f"unknown preset {name!r}; available: {PRESET_NAMES}")
    return resources.files("barenco").joinpath("data/appendixA.cfg").read_text()


def load_preset_config(name: str) -> tuple[VdwSpec, RotatedBasis]:
    """Parse the bundled config through the standard file loader."""
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as tmp:
        p = Path(tmp) / f"{name}.cfg"
        p.write_text(preset_config_text(name))
        return load_interaction_config(p)
