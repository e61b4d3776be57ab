# Models package: pydantic data models and the error hierarchy
