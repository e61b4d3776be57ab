# Accessibility package: majorization, eta windows, delta-prime construction, verdicts
