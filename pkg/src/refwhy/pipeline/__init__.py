"""Pipeline entry points: configuration, stages, the review service, and the CLI."""
