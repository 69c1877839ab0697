"""Exactly solvable models with closed-form spectra and independent numerical eigensolvers.

Modules:
periodic -- neutral particle in the rotating field of constant strength (helix field).
radial -- rotationally invariant field with a Coulomb-like scalar potential.
susy -- shape invariant model built from the exponentially decaying field.
"""
