"""Layered learner trained on the closed-loop error."""
