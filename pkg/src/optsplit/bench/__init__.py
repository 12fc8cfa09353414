"""Problem generators, experiment harness and command-line interface."""
