"""Twin-beam sideband covariance toolkit: amplifier model, resonator-assisted
detection spectra, covariance reconstruction and entanglement witnesses."""

import sys

from ._twinbeam import *  # noqa: F401,F403
from ._twinbeam import TwinbeamError, run_cli

__all__ = [name for name in dir() if not name.startswith("_")]


def main(argv=None):
    """Console entry point mirroring the C++ ``twinbeam`` executable."""
    args = list(sys.argv[1:] if argv is None else argv)
    return run_cli(args)
