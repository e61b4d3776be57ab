# Channels package: T-transform witnesses, pinching, trace distances, impossibility bounds
