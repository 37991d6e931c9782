"""Manufactured Stokes solutions"""

from problems.manufactured import Problem, boundary_layer_problem, polynomial_problem, problem_by_name

__all__ = ['Problem', 'boundary_layer_problem', 'polynomial_problem', 'problem_by_name']
