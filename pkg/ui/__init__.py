"""Console output: themed rich consoles, messages, spinners and tables."""
