"""Command-line interface, configuration and real-data pipeline."""
