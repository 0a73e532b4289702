"""Pipeline services: datasets, training, model files, analysis and reports."""
