# Configuration package: numerical defaults, model families, scenario files
