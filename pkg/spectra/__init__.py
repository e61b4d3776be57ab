# Spectra package: model families and joint eigenvalue multiplicity tables
