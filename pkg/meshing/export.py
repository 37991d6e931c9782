import logging
from pathlib import Path
from typing import Union

import numpy as np

from meshing.generator import Mesh

logger = logging.getLogger(__name__)


def write_mesh_text(mesh: Mesh, path: Union[str, Path]) -> Path:
    """
    Write a plain-text mesh for plotting

    Format: 'v <count>' followed by one 'x y' per line, then 't <count>'
    followed by one 'i j k' per line (0-based vertex ids).

    Args:
        mesh: Mesh to export
        path: Output file

    Returns:
        Path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8') as handle:
        handle.write(f"v {mesh.n_vertices}\n")
        np.savetxt(handle, mesh.vertices, fmt='%.17g')
        handle.write(f"t {mesh.n_triangles}\n")
        np.savetxt(handle, mesh.triangles, fmt='%d')

    logger.info("Mesh written to %s (%d vertices, %d triangles)", path, mesh.n_vertices, mesh.n_triangles)
    return path
