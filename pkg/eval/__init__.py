"""
Adiabatic Accessibility Evaluation Suite
Checks entropy convergence, majorization witnesses and accessibility verdicts
"""

__version__ = "1.0.0"
