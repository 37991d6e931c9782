"""Convergence reports and CLI helpers"""
