"""
pilotmesh command-line interface.

Example:
    pilotmesh gen --seed 7 -o scenario.json
    pilotmesh solve scenario.json --trace -o out/
    pilotmesh simulate --scenario scenario.json --mode both -o out/
    pilotmesh qoe-eval --ratings 2,-2,2
"""

from pilotmesh.cli.main import app

__all__ = ("app",)
