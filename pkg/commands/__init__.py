"""Command handlers for the qslkit CLI.

Each module handles one subcommand and returns an ExitCode:
- qsl.py: exact speed limit of a gate
- curve.py: space curve export
- classify.py: speed limit and curve geometry
- certify.py: common-commutant test of a certifying set
- bottleneck.py: bottleneck lower bound and planarity diagnostic
- table.py: minimal gate time table
- gates.py: gate registry dump
"""

from commands.bottleneck import bottleneck
from commands.certify import certify
from commands.classify import classify
from commands.curve import curve
from commands.gates import gates
from commands.qsl import qsl
from commands.table import table

__all__ = ["bottleneck", "certify", "classify", "curve", "gates", "qsl", "table"]
