"""Neural classifier: numpy MLP and per-n architecture presets."""
