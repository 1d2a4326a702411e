"""Trial runner, sweeps, metrics and artifacts."""
