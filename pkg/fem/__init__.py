"""Quadrature, Crouzeix-Raviart and Raviart-Thomas spaces"""

from fem.quadrature import (QuadRule, cell_quadrature, edge_average, edge_midpoint_value,
                            integrate_on_triangle, triangle_rule)
from fem.spaces import (CRLocalBasis, DofMap, RTLocalBasis, Scheme, cr_gradients, cr_interpolate_local,
                        cr_local_basis, global_interpolate_cr, l2_project_cell, l2_project_cells,
                        l2_project_face, rt_interpolate_local, rt_local_basis)

__all__ = [
    'QuadRule', 'cell_quadrature', 'edge_average', 'edge_midpoint_value', 'integrate_on_triangle',
    'triangle_rule', 'CRLocalBasis', 'DofMap', 'RTLocalBasis', 'Scheme', 'cr_gradients',
    'cr_interpolate_local', 'cr_local_basis', 'global_interpolate_cr', 'l2_project_cell',
    'l2_project_cells', 'l2_project_face', 'rt_interpolate_local', 'rt_local_basis',
]
