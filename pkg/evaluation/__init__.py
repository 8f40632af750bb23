"""
Evaluation package for the caching lab.

Contains the asymptotic trend engine, the per-instance verification battery
and the reproduction runner.
"""
