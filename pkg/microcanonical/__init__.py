# Microcanonical package: dimension counting, Boltzmann entropies, flat states
