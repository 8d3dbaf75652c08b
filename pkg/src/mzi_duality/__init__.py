"""Single-photon Mach-Zehnder complementarity: which-way marking by polarization,
duality relations, and seeded guessing-game simulations."""

__version__ = "0.1.0"
