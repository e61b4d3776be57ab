# Storage package: deterministic CSV/JSON run outputs
