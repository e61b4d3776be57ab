# Regularization package: entropy density sequences, limit estimates, delta schedules
