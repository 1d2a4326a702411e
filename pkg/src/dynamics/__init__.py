"""Discrete-time linear blocks: transfer functions, feedback loops and the predictor filter bank."""
