"""Epistemic ensembles: agents running guarded processes over S5 Kripke states.

Configurations can be executed semantically, on classes of pointed Kripke
states, or symbolically, on sets of focus formulas whose updates are looked up
in a table of weakest-precondition representatives.
"""

__version__ = "0.1.0"
